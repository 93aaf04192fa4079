// Command-line front end: training, evaluation, completion, and the
// channel/lifelong experiment drivers.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rsc/experiments.hpp"
#include "rsc/session.hpp"
#include "rsc/svg.hpp"

namespace {

struct CommonOpts {
    std::string dataset;  // directory containing train.txt / test.txt
    std::size_t dim = 50;
    std::string mode = "additive";
    std::size_t epochs = 1000;
    double lr = 0.01;
    double margin = 1.0;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string snr_grid = "0:20:2";
    unsigned bits_per_dim = 16;
    std::string checkpoint;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--dataset", o.dataset, "directory with train.txt and test.txt");
    cmd->add_option("--dim", o.dim, "embedding dimension");
    cmd->add_option("--mode", o.mode, "inference mode: additive|linear|multiplicative|general");
    cmd->add_option("--epochs", o.epochs, "training epoch cap");
    cmd->add_option("--lr", o.lr, "SGD learning rate");
    cmd->add_option("--margin", o.margin, "ranking margin c''");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--snr-grid", o.snr_grid, "SNR sweep as min:max:step (dB)");
    cmd->add_option("--bits-per-dim", o.bits_per_dim, "quantizer bits per coordinate");
    cmd->add_option("--checkpoint", o.checkpoint, "model checkpoint path");
}

rsc::Dataset load(const CommonOpts& o) {
    if (o.dataset.empty()) throw CLI::ValidationError("--dataset is required");
    auto dir = std::filesystem::path(o.dataset);
    return rsc::load_dataset((dir / "train.txt").string(), (dir / "test.txt").string());
}

rsc::TrainConfig train_config(const CommonOpts& o) {
    rsc::TrainConfig cfg;
    cfg.learning_rate = o.lr;
    cfg.epochs = o.epochs;
    cfg.seed = o.seed;
    return cfg;
}

rsc::MarginSchedule margin_schedule(const CommonOpts& o) {
    rsc::MarginSchedule m;
    m.default_margin = o.margin;
    return m;
}

void parse_snr_grid(const std::string& text, rsc::ExperimentSpec& spec) {
    double lo, hi, step;
    char c1, c2;
    std::istringstream is(text);
    if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
        throw CLI::ValidationError("--snr-grid expects min:max:step");
    spec.snr_min = lo;
    spec.snr_max = hi;
    spec.snr_step = step;
}

rsc::ExperimentSpec experiment_spec(const CommonOpts& o) {
    rsc::ExperimentSpec spec;
    spec.out_dir = o.out;
    spec.dim = o.dim;
    spec.train = train_config(o);
    spec.margins = margin_schedule(o);
    spec.quant.bits_per_dim = o.bits_per_dim;
    spec.seed = o.seed;
    parse_snr_grid(o.snr_grid, spec);
    return spec;
}

std::string out_file(const CommonOpts& o, const std::string& name) {
    std::filesystem::create_directories(o.out);
    return (std::filesystem::path(o.out) / name).string();
}

int cmd_train(const CommonOpts& o) {
    auto ds = load(o);
    auto model = rsc::init_model(ds.graph.n_entities(), ds.graph.n_relations(), o.dim, o.seed,
                                 {rsc::parse_inference_mode(o.mode), {}});
    std::ofstream log(out_file(o, "train_log.csv"));
    auto result = rsc::train(model, ds.graph, ds.graph.triplets(), train_config(o),
                             margin_schedule(o), &log);
    std::string ckpt = o.checkpoint.empty() ? out_file(o, "model.rsc") : o.checkpoint;
    rsc::save_checkpoint(model, ckpt);
    std::cout << "epochs_run=" << result.epochs_run << " converged=" << result.converged
              << " final_loss=" << result.loss_history.back() << "\ncheckpoint=" << ckpt << '\n';
    return 0;
}

int cmd_eval(const CommonOpts& o, bool filtered, const std::string& mask) {
    auto ds = load(o);
    if (o.checkpoint.empty()) throw CLI::ValidationError("--checkpoint is required");
    auto model = rsc::load_checkpoint(o.checkpoint);
    rsc::MaskPolicy policy = mask == "head"   ? rsc::MaskPolicy::Head
                             : mask == "tail" ? rsc::MaskPolicy::Tail
                                              : rsc::MaskPolicy::BothAlternating;
    auto report = rsc::evaluate_completion(model, ds.graph, ds.test, policy, o.seed, filtered);
    std::cout << "queries=" << report.n_queries << " hits@1=" << report.hits_at_1
              << " hits@10=" << report.hits_at_10 << " mean_rank=" << report.mean_rank << '\n';
    return 0;
}

int cmd_complete(const CommonOpts& o, const std::string& head, const std::string& relation,
                 const std::string& tail, std::size_t top_k) {
    auto ds = load(o);
    if (o.checkpoint.empty()) throw CLI::ValidationError("--checkpoint is required");
    auto model = rsc::load_checkpoint(o.checkpoint);

    rsc::PartialTriplet query;
    auto resolve = [&](const std::string& symbol, auto& slot, const rsc::Vocabulary& vocab) {
        if (symbol.empty()) return;
        auto id = vocab.find(symbol);
        if (!id) throw CLI::ValidationError("unknown symbol: " + symbol);
        slot = *id;
    };
    resolve(head, query.head, ds.graph.entities());
    resolve(relation, query.relation, ds.graph.relations());
    resolve(tail, query.tail, ds.graph.entities());

    auto result = rsc::complete(model, ds.graph, query, top_k);
    for (const auto& [t, s] : result.ranked_candidates)
        std::cout << ds.graph.entities().symbol(t.head) << '\t'
                  << ds.graph.relations().symbol(t.relation) << '\t'
                  << ds.graph.entities().symbol(t.tail) << '\t' << s << '\n';
    return 0;
}

int cmd_per(const CommonOpts& o, std::size_t packets) {
    auto ds = load(o);
    if (o.checkpoint.empty()) throw CLI::ValidationError("--checkpoint is required");
    auto spec = experiment_spec(o);
    spec.packets_per_point = packets;
    std::vector<rsc::EmbeddingModel> models;
    models.push_back(rsc::load_checkpoint(o.checkpoint));
    auto r = rsc::run_per_vs_snr(ds.graph, models, spec);
    rsc::export_per_vs_snr(r, spec, out_file(o, "per_vs_snr.csv"), out_file(o, "per_vs_snr.svg"));
    std::cout << "wrote " << out_file(o, "per_vs_snr.csv") << '\n';
    return 0;
}

int cmd_loss_curves(const CommonOpts& o) {
    auto ds = load(o);
    auto spec = experiment_spec(o);
    auto r = rsc::run_loss_curves(ds.graph, spec);
    rsc::export_loss_curves(r, spec, out_file(o, "loss_curves.csv"),
                            out_file(o, "loss_curves.svg"));
    std::cout << "wrote " << out_file(o, "loss_curves.csv") << '\n';
    return 0;
}

int cmd_acc_curve(const CommonOpts& o, std::vector<double> fractions) {
    auto ds = load(o);
    auto spec = experiment_spec(o);
    if (!fractions.empty()) spec.train_fractions = std::move(fractions);
    auto r = rsc::run_acc_vs_trainsize(ds, spec);
    rsc::export_acc_vs_trainsize(r, spec, out_file(o, "acc_vs_trainsize.csv"),
                                 out_file(o, "acc_vs_trainsize.svg"));
    std::cout << "wrote " << out_file(o, "acc_vs_trainsize.csv") << '\n';
    return 0;
}

int cmd_scatter(const CommonOpts& o, const std::string& mapping, const std::string& cat_a,
                const std::string& cat_b) {
    auto ds = load(o);
    if (o.checkpoint.empty()) throw CLI::ValidationError("--checkpoint is required");
    auto model = rsc::load_checkpoint(o.checkpoint);
    auto r = rsc::run_category_scatter(model, ds.graph, mapping, cat_a, cat_b);
    auto spec = experiment_spec(o);
    rsc::export_category_scatter(r, spec, out_file(o, "category_scatter.csv"),
                                 out_file(o, "category_scatter.svg"));
    std::cout << "points=" << r.points.size() << " mean_intra=" << r.mean_intra
              << " mean_inter=" << r.mean_inter << " separation=" << r.separation << '\n';
    return 0;
}

int cmd_session(const CommonOpts& o, std::size_t slots, double fraction, double snr_db) {
    auto ds = load(o);
    auto stream = rsc::make_stream(ds.graph, slots, fraction, o.seed);
    auto state = rsc::init_session(o.seed, train_config(o),
                                   {rsc::parse_inference_mode(o.mode), {}}, o.dim);
    state.margins = margin_schedule(o);
    rsc::ChannelConfig ch;
    ch.snr_db = snr_db;
    ch.seed = o.seed;
    rsc::QuantizationSpec spec{o.bits_per_dim, 1.0};
    auto trace = rsc::run_session(state, stream, ch, spec);

    std::ofstream os(out_file(o, "session_trace.csv"));
    rsc::write_session_trace_csv(trace, os);
    double cum = 0;
    for (const auto& s : trace.slots) cum += s.slot_distance;
    std::cout << "slots=" << trace.slots.size() << " final_entities=" << state.graph.n_entities()
              << " cum_distance=" << cum << "\nwrote " << out_file(o, "session_trace.csv") << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reasoning-driven semantic transmission toolkit"};
    app.require_subcommand(1);
    CommonOpts o;

    auto* train = app.add_subcommand("train", "train an embedding model and save a checkpoint");
    add_common(train, o);

    bool filtered = false;
    std::string mask = "both";
    auto* eval = app.add_subcommand("eval", "rank test triplets with a trained model");
    add_common(eval, o);
    eval->add_flag("--filtered", filtered, "skip candidates that form other known triplets");
    eval->add_option("--mask", mask, "masked slot: head|tail|both");

    std::string q_head, q_relation, q_tail;
    std::size_t top_k = 10;
    auto* complete = app.add_subcommand("complete", "fill the missing slot(s) of a triplet");
    add_common(complete, o);
    complete->add_option("--head", q_head, "head symbol (omit to infer)");
    complete->add_option("--relation", q_relation, "relation symbol (omit to infer)");
    complete->add_option("--tail", q_tail, "tail symbol (omit to infer)");
    complete->add_option("--top-k", top_k, "number of ranked candidates to print");

    std::size_t packets = 2000;
    auto* per = app.add_subcommand("per", "packet error rate vs SNR sweep");
    add_common(per, o);
    per->add_option("--packets", packets, "packets per grid point");

    auto* loss = app.add_subcommand("loss-curves", "additive vs linear training loss");
    add_common(loss, o);

    std::vector<double> fractions;
    auto* acc = app.add_subcommand("acc-curve", "recovery accuracy vs training-set size");
    add_common(acc, o);
    acc->add_option("--fractions", fractions, "training-set fractions to sweep");

    std::string mapping, cat_a = "city", cat_b = "drug";
    auto* scatter = app.add_subcommand("scatter", "2D projection of two entity categories");
    add_common(scatter, o);
    scatter->add_option("--mapping", mapping, "symbol<TAB>category file")->required();
    scatter->add_option("--category-a", cat_a, "first category label");
    scatter->add_option("--category-b", cat_b, "second category label");

    std::size_t slots = 10;
    double fraction = 0.2, snr_db = 10.0;
    auto* session = app.add_subcommand("session", "life-long transmit/receive simulation");
    add_common(session, o);
    session->add_option("--slots", slots, "number of time slots");
    session->add_option("--fraction", fraction, "fraction of each slot left incomplete");
    session->add_option("--snr", snr_db, "channel SNR in dB");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(o);
        if (eval->parsed()) return cmd_eval(o, filtered, mask);
        if (complete->parsed()) return cmd_complete(o, q_head, q_relation, q_tail, top_k);
        if (per->parsed()) return cmd_per(o, packets);
        if (loss->parsed()) return cmd_loss_curves(o);
        if (acc->parsed()) return cmd_acc_curve(o, fractions);
        if (scatter->parsed()) return cmd_scatter(o, mapping, cat_a, cat_b);
        if (session->parsed()) return cmd_session(o, slots, fraction, snr_db);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

// Command-line front end: ingestion, learning, disambiguation, evaluation,
// and simulation over the file formats described in the README.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "lexmdl/baselines.hpp"
#include "lexmdl/cooccur.hpp"
#include "lexmdl/corpus.hpp"
#include "lexmdl/depforest.hpp"
#include "lexmdl/disambig.hpp"
#include "lexmdl/eval.hpp"
#include "lexmdl/model_io.hpp"
#include "lexmdl/softmix.hpp"
#include "lexmdl/thesaurus.hpp"
#include "lexmdl/treecut.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lexmdl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;

struct CommonOptions {
    fs::path out_dir;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    bool json_errors = false;
};

std::string encode_token(const std::string &token) {
    std::string out;
    for (unsigned char c : token) {
        if (isalnum(c) || c == '.' || c == '_' || c == '-') {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof(buf), "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

std::ifstream open_input(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open input file " + path.string());
    return in;
}

template <typename Fn>
void parallel_for(unsigned jobs, std::size_t n, Fn fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t workers = std::min<std::size_t>(jobs, n);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto &t : pool) t.join();
}

Thesaurus load_thesaurus(const fs::path &path) {
    auto in = open_input(path);
    return parse_thesaurus(in);
}

// ---------------------------------------------------------------- generalize

int cmd_generalize(const CommonOptions &common, const fs::path &data_path,
                   const fs::path &thesaurus_path, double report_threshold) {
    auto in = open_input(data_path);
    std::vector<CaseSlotSample> samples = parse_case_slot_file(in);
    if (samples.empty()) throw ValidationError("no data");
    Thesaurus t = load_thesaurus(thesaurus_path);

    std::vector<GeneralizeResult> results(samples.size());
    std::vector<std::string> errors(samples.size());
    parallel_for(common.jobs, samples.size(), [&](std::size_t i) {
        try {
            results[i] = generalize(samples[i], t, report_threshold);
        } catch (const std::exception &e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!errors[i].empty())
            throw ValidationError("generalizing " + samples[i].verb + "/" +
                                  samples[i].slot + ": " + errors[i]);

    std::ostringstream report, index;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto &r = results[i];
        std::string file = encode_token(r.model.verb) + "__" +
                           encode_token(r.model.slot) + ".tcm.json";
        write_json_atomic(common.out_dir / file, tree_cut_to_json(r.model, t));
        index << r.model.verb << '\t' << r.model.slot << '\t' << file << '\n';
        for (const auto &row : r.report)
            report << r.model.verb << '\t' << r.model.slot << '\t' << row.first
                   << '\t' << format_double(row.second) << '\n';
        for (const auto &tok : r.start.unknown_tokens)
            std::cerr << "warning: " << r.model.verb << "/" << r.model.slot
                      << ": unknown token '" << tok << "' skipped\n";
        if (r.start.excluded_leaves > 0)
            std::cerr << "note: " << r.model.verb << "/" << r.model.slot << ": "
                      << r.start.excluded_leaves
                      << " thesaurus leaves outside the model support\n";
    }
    write_text_atomic(common.out_dir / "report.tsv", report.str());
    write_text_atomic(common.out_dir / "index.tsv", index.str());
    return kExitOk;
}

// ---------------------------------------------------------------- learn-deps

int cmd_learn_deps(const CommonOptions &common, const fs::path &data_path) {
    auto in = open_input(data_path);
    std::vector<CaseFrameSample> samples = parse_case_frame_file(in);
    if (samples.empty()) throw ValidationError("no data");

    struct VerbResult {
        DependencyForestModel model;
        std::vector<ThetaEntry> entries;
        std::vector<std::string> names;
    };
    std::vector<VerbResult> results(samples.size());
    std::vector<std::string> errors(samples.size());
    parallel_for(common.jobs, samples.size(), [&](std::size_t i) {
        try {
            PairStats stats = make_pair_stats(frames_to_vectors(samples[i]));
            results[i].model = learn_forest(stats);
            results[i].model.verb = samples[i].verb;
            results[i].entries = theta_table(stats);
            for (const auto &v : stats.variables())
                results[i].names.push_back(v.name);
        } catch (const std::exception &e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (!errors[i].empty())
            throw ValidationError("learning " + samples[i].verb + ": " +
                                  errors[i]);

    std::ostringstream theta_out;
    theta_out << "# verb\tslot_i\tslot_j\tmi_bits\ttheta\n";
    for (const auto &r : results) {
        write_json_atomic(common.out_dir /
                              (encode_token(r.model.verb) + ".forest.json"),
                          forest_to_json(r.model));
        for (const auto &e : r.entries)
            theta_out << r.model.verb << '\t' << r.names[e.i] << '\t'
                      << r.names[e.j] << '\t' << format_double(e.mi) << '\t'
                      << format_double(e.theta) << '\n';
    }
    write_text_atomic(common.out_dir / "theta.tsv", theta_out.str());
    return kExitOk;
}

// ------------------------------------------------------------------- cluster

int cmd_cluster(const CommonOptions &common, const fs::path &data_path,
                std::size_t bn, std::size_t bv) {
    auto in = open_input(data_path);
    std::vector<CooccurrenceSample> samples = parse_cooccurrence_file(in);
    if (samples.empty()) throw ValidationError("no data");

    for (const auto &sample : samples) {
        ClusterResult r = two_d_clustering(sample, bn, bv);
        std::string base = encode_token(sample.slot);
        write_json_atomic(common.out_dir / (base + ".hcm.json"),
                          cooccurrence_to_json(r.model));
        write_text_atomic(common.out_dir / (base + ".merges.tsv"),
                          merge_history_tsv(r.history));
        write_text_atomic(
            common.out_dir / (base + ".nouns.thes"),
            thesaurus_edges(thesaurus_from_history(r.history, ClusterSide::noun,
                                                   sample.noun_vocab)));
        write_text_atomic(
            common.out_dir / (base + ".verbs.thes"),
            thesaurus_edges(thesaurus_from_history(r.history, ClusterSide::verb,
                                                   sample.verb_vocab)));
    }
    return kExitOk;
}

// -------------------------------------------------------------- disambiguate

std::map<std::string, HardCooccurrenceModel> load_hcm_dir(const fs::path &dir) {
    std::map<std::string, HardCooccurrenceModel> out;
    if (dir.empty()) return out;
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
        HardCooccurrenceModel model = cooccurrence_from_json(read_json(f));
        out[model.slot] = std::move(model);
    }
    return out;
}

std::map<std::pair<std::string, std::string>, TreeCutModel>
load_tcm_dir(const fs::path &dir, const Thesaurus *t) {
    std::map<std::pair<std::string, std::string>, TreeCutModel> out;
    if (dir.empty()) return out;
    if (!t)
        throw ValidationError("tree cut model directories need --thesaurus");
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
        TreeCutModel model = tree_cut_from_json(read_json(f), *t);
        out[{model.verb, model.slot}] = std::move(model);
    }
    return out;
}

int cmd_disambiguate(const CommonOptions &common, const fs::path &quads_path,
                     const fs::path &hcm_v_dir, const fs::path &hcm_n_dir,
                     const fs::path &tcm_v_dir, const fs::path &tcm_n_dir,
                     const fs::path &thesaurus_path, const std::string &fallback,
                     bool sweep, const std::string &sweep_method) {
    auto in = open_input(quads_path);
    std::vector<QuadrupleRecord> quads = parse_quadruple_file(in);
    if (quads.empty()) throw ValidationError("no data");

    std::optional<Thesaurus> thesaurus;
    if (!thesaurus_path.empty()) thesaurus = load_thesaurus(thesaurus_path);

    BackoffRegistry registry;
    registry.hcm_verb = load_hcm_dir(hcm_v_dir);
    registry.hcm_noun = load_hcm_dir(hcm_n_dir);
    registry.thesaurus = thesaurus ? &*thesaurus : nullptr;
    registry.tcm_verb = load_tcm_dir(tcm_v_dir, registry.thesaurus);
    registry.tcm_noun = load_tcm_dir(tcm_n_dir, registry.thesaurus);

    Choice fallback_choice = fallback == "v" ? Choice::attach_v : Choice::attach_n1;

    std::vector<AttachmentDecision> decisions(quads.size());
    parallel_for(common.jobs, quads.size(), [&](std::size_t i) {
        decisions[i] = backoff_decide(quads[i], registry, fallback_choice);
    });

    std::ostringstream out;
    std::size_t labeled = 0, correct = 0;
    for (std::size_t i = 0; i < quads.size(); ++i) {
        const auto &q = quads[i];
        const auto &d = decisions[i];
        out << q.v << '\t' << q.n1 << '\t' << q.p << '\t' << q.n2 << '\t'
            << choice_name(d.choice) << '\t' << stage_name(d.stage) << '\t'
            << format_double(d.score_v) << '\t' << format_double(d.score_n1)
            << '\n';
        if (q.label) {
            ++labeled;
            bool is_v = d.choice == Choice::attach_v;
            if ((*q.label == AttachmentLabel::attv) == is_v &&
                d.choice != Choice::none)
                ++correct;
        }
    }
    if (labeled > 0) {
        double coverage = 1.0; // every record gets the default if nothing else
        double accuracy = static_cast<double>(correct) / labeled;
        out << "# records=" << quads.size() << " coverage="
            << format_double(coverage) << " accuracy=" << format_double(accuracy)
            << '\n';
        std::cout << "accuracy " << format_double(accuracy) << " over "
                  << labeled << " labeled records\n";
    }
    write_text_atomic(common.out_dir / "decisions.tsv", out.str());

    if (sweep) {
        if (labeled != quads.size())
            throw ValidationError("threshold sweep needs labels on every record");
        bool use_hcm = sweep_method == "hcm" ||
                       (sweep_method == "auto" && !registry.hcm_verb.empty());
        std::vector<ScoredQuadruple> scored;
        scored.reserve(quads.size());
        for (const auto &q : quads) {
            ScoredQuadruple s;
            if (use_hcm) {
                auto iv = registry.hcm_verb.find(q.p);
                auto in1 = registry.hcm_noun.find(q.p);
                if (iv != registry.hcm_verb.end())
                    s.score_v = noun_given_verb(iv->second, q.n2, q.v).value_or(0.0);
                if (in1 != registry.hcm_noun.end())
                    s.score_n1 =
                        noun_given_verb(in1->second, q.n2, q.n1).value_or(0.0);
            } else {
                auto iv = registry.tcm_verb.find({q.v, q.p});
                auto in1 = registry.tcm_noun.find({q.n1, q.p});
                if (iv != registry.tcm_verb.end())
                    s.score_v = tcm_conditional(iv->second, *thesaurus, q.n2);
                if (in1 != registry.tcm_noun.end())
                    s.score_n1 = tcm_conditional(in1->second, *thesaurus, q.n2);
            }
            s.label = *q.label;
            scored.push_back(s);
        }
        std::vector<double> thresholds{0,    0.01, 0.02, 0.05,
                                       0.1,  0.2,  0.5,  0.75};
        std::ostringstream csv;
        csv << "threshold,coverage,accuracy\n";
        for (const auto &p : threshold_sweep(scored, thresholds)) {
            csv << format_double(p.threshold) << ',' << format_double(p.coverage)
                << ',';
            if (p.accuracy) csv << format_double(*p.accuracy);
            csv << '\n';
        }
        write_text_atomic(common.out_dir / "sweep.csv", csv.str());
    }
    return kExitOk;
}

// ------------------------------------------------------------------ evaluate

int cmd_evaluate(const CommonOptions &common, const fs::path &data_path,
                 std::size_t folds) {
    auto in = open_input(data_path);
    std::vector<CaseFrameSample> samples = parse_case_frame_file(in);
    if (samples.empty()) throw ValidationError("no data");

    std::ostringstream csv;
    csv << "verb,independent_perplexity,forest_perplexity,reduction_percent\n";
    for (const auto &sample : samples) {
        if (sample.frames.size() < folds) {
            std::cerr << "note: skipping " << sample.verb << ": fewer than "
                      << folds << " case frames\n";
            continue;
        }
        AssignmentTable full = frames_to_vectors(sample);
        std::vector<VariableSpec> specs = make_pair_stats(full).variables();

        auto table_for = [&](const std::vector<std::size_t> &idx) {
            CaseFrameSample sub;
            sub.verb = sample.verb;
            sub.granularity = sample.granularity;
            sub.slot_inventory = sample.slot_inventory;
            for (std::size_t i : idx) sub.frames.push_back(sample.frames[i]);
            return frames_to_vectors(sub);
        };

        double indep_sum = 0.0, forest_sum = 0.0;
        for (const Fold &fold : split_folds(sample.frames.size(), folds,
                                            common.seed)) {
            PairStats stats = make_pair_stats(table_for(fold.train), specs);
            DependencyForestModel forest = learn_forest(stats);
            DependencyForestModel indep = estimate_forest_model(stats, {});
            AssignmentTable test = table_for(fold.test);
            auto prob_fn = [](const DependencyForestModel &m) {
                return [&m](const std::vector<std::string> &row) {
                    return joint_probability(m, row);
                };
            };
            forest_sum += perplexity(prob_fn(forest), test).perplexity;
            indep_sum += perplexity(prob_fn(indep), test).perplexity;
        }
        double indep_mean = indep_sum / static_cast<double>(folds);
        double forest_mean = forest_sum / static_cast<double>(folds);
        double reduction = indep_mean > 0.0 && std::isfinite(indep_mean)
                               ? (indep_mean - forest_mean) / indep_mean * 100.0
                               : 0.0;
        csv << sample.verb << ',' << format_double(indep_mean) << ','
            << format_double(forest_mean) << ',' << format_double(reduction)
            << '\n';
    }
    write_text_atomic(common.out_dir / "perplexity.csv", csv.str());
    return kExitOk;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(const CommonOptions &common, const fs::path &model_path,
                 const std::vector<std::size_t> &sizes, std::size_t trials) {
    DependencyForestModel model = forest_from_json(read_json(model_path));
    auto curve = run_recovery_experiment(model, sizes, trials, common.seed);
    std::ostringstream csv;
    csv << "size,mean_links,mean_kl,trials,seed\n";
    for (const auto &p : curve)
        csv << p.data_size << ',' << format_double(p.mean_links) << ','
            << format_double(p.mean_kl) << ',' << p.trials << ',' << p.seed
            << '\n';
    write_text_atomic(common.out_dir / "curve.csv", csv.str());
    return kExitOk;
}

// --------------------------------------------------------------- softmix-fit

int cmd_softmix_fit(const CommonOptions &common, const fs::path &data_path,
                    const fs::path &model_path, double eta) {
    auto in = open_input(data_path);
    std::vector<CaseSlotSample> samples = parse_case_slot_file(in);
    if (samples.empty()) throw ValidationError("no data");
    SoftCaseSlotModel base = softmix_from_json(read_json(model_path));

    for (const auto &sample : samples) {
        std::vector<std::string> tokens;
        for (const auto &kv : sample.counts) {
            double rounded = std::round(kv.second);
            if (std::abs(kv.second - rounded) > 1e-9 || rounded < 0)
                throw ValidationError("softmix-fit needs integral counts, got " +
                                      format_double(kv.second) + " for '" +
                                      kv.first + "'");
            for (std::size_t i = 0; i < static_cast<std::size_t>(rounded); ++i)
                tokens.push_back(kv.first);
        }
        SoftCaseSlotModel model = base;
        model.verb = sample.verb;
        model.slot = sample.slot;
        EmOptions options;
        options.eta = eta;
        EmTrace trace = em_fit(model, tokens, options);
        if (trace.clamped_steps > 0)
            std::cerr << "warning: " << sample.verb << "/" << sample.slot << ": "
                      << trace.clamped_steps
                      << " steps left the simplex and were renormalized\n";
        write_json_atomic(common.out_dir /
                              (encode_token(sample.verb) + "__" +
                               encode_token(sample.slot) + ".softmix.json"),
                          softmix_to_json(model));
    }
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Lexical knowledge acquisition under the MDL principle"};
    app.require_subcommand(1);
    app.set_config("--config");

    CommonOptions common;
    app.add_flag("--json-errors", common.json_errors,
                 "machine-readable errors on stderr");

    auto add_common = [&common](CLI::App *cmd) {
        cmd->add_option("--out", common.out_dir, "output directory")->required();
        cmd->add_option("--seed", common.seed, "random seed");
        cmd->add_option("--jobs", common.jobs, "worker threads")
            ->check(CLI::PositiveNumber);
    };

    // generalize
    fs::path gen_data, gen_thesaurus;
    double report_threshold = 0.05;
    auto *gen = app.add_subcommand("generalize",
                                   "tree cut models from case slot data");
    gen->add_option("data", gen_data, "case slot file")->required();
    gen->add_option("--thesaurus", gen_thesaurus, "thesaurus edge list")
        ->required();
    gen->add_option("--report-threshold", report_threshold,
                    "minimum class probability reported");
    add_common(gen);

    // learn-deps
    fs::path deps_data;
    auto *deps = app.add_subcommand("learn-deps",
                                    "dependency forests from case frame data");
    deps->add_option("data", deps_data, "case frame file")->required();
    add_common(deps);

    // cluster
    fs::path cluster_data;
    std::size_t bn = 1, bv = 1;
    auto *cluster = app.add_subcommand("cluster",
                                       "2D clustering of co-occurrence data");
    cluster->add_option("data", cluster_data, "co-occurrence file")->required();
    cluster->add_option("--bn", bn, "noun merges per step")
        ->check(CLI::PositiveNumber);
    cluster->add_option("--bv", bv, "verb merges per step")
        ->check(CLI::PositiveNumber);
    add_common(cluster);

    // disambiguate
    fs::path quads_path, hcm_v, hcm_n, tcm_v, tcm_n, dis_thesaurus;
    std::string fallback, sweep_method = "auto";
    bool sweep = false;
    auto *dis = app.add_subcommand("disambiguate",
                                   "back-off pp-attachment decisions");
    dis->add_option("data", quads_path, "quadruple file")->required();
    dis->add_option("--default", fallback, "default attachment: v or n1")
        ->required()
        ->check(CLI::IsMember({"v", "n1"}));
    dis->add_option("--hcm-v", hcm_v, "co-occurrence models for the verb side");
    dis->add_option("--hcm-n", hcm_n, "co-occurrence models for the noun side");
    dis->add_option("--tcm-v", tcm_v, "tree cut models for the verb side");
    dis->add_option("--tcm-n", tcm_n, "tree cut models for the noun side");
    dis->add_option("--thesaurus", dis_thesaurus, "thesaurus edge list");
    dis->add_flag("--sweep", sweep, "write an accuracy-coverage table");
    dis->add_option("--sweep-method", sweep_method, "hcm, tcm, or auto")
        ->check(CLI::IsMember({"hcm", "tcm", "auto"}));
    add_common(dis);

    // evaluate
    fs::path eval_data;
    std::size_t folds = 10;
    auto *eval = app.add_subcommand(
        "evaluate", "cross-validated perplexity, forest vs independent");
    eval->add_option("data", eval_data, "case frame file")->required();
    eval->add_option("--folds", folds, "cross-validation folds")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
    add_common(eval);

    // simulate
    fs::path sim_model;
    std::vector<std::size_t> sizes{50, 100, 200, 500, 1000};
    std::size_t trials = 10;
    auto *sim = app.add_subcommand("simulate",
                                   "model-recovery learning curves");
    sim->add_option("--model", sim_model, "true forest model JSON")->required();
    sim->add_option("--sizes", sizes, "ascending sample sizes")->delimiter(',');
    sim->add_option("--trials", trials, "trials per size")
        ->check(CLI::PositiveNumber);
    add_common(sim);

    // softmix-fit
    fs::path softmix_data, softmix_model;
    double eta = 1.0;
    auto *softmix = app.add_subcommand("softmix-fit",
                                       "EM for soft case slot coefficients");
    softmix->add_option("data", softmix_data, "case slot file")->required();
    softmix->add_option("--model", softmix_model,
                        "initial mixture model JSON")->required();
    softmix->add_option("--eta", eta, "learning rate (1 = standard EM)");
    add_common(softmix);

    CLI11_PARSE(app, argc, argv);

    auto report_error = [&](const char *type, const std::string &message,
                            int code) {
        if (common.json_errors) {
            json err{{"error", message}, {"type", type}};
            std::cerr << err.dump() << '\n';
        } else {
            std::cerr << "error: " << message << '\n';
        }
        return code;
    };

    try {
        if (!common.out_dir.empty())
            fs::create_directories(common.out_dir);
        if (gen->parsed())
            return cmd_generalize(common, gen_data, gen_thesaurus,
                                  report_threshold);
        if (deps->parsed()) return cmd_learn_deps(common, deps_data);
        if (cluster->parsed())
            return cmd_cluster(common, cluster_data, bn, bv);
        if (dis->parsed())
            return cmd_disambiguate(common, quads_path, hcm_v, hcm_n, tcm_v,
                                    tcm_n, dis_thesaurus, fallback, sweep,
                                    sweep_method);
        if (eval->parsed()) return cmd_evaluate(common, eval_data, folds);
        if (sim->parsed()) return cmd_simulate(common, sim_model, sizes, trials);
        if (softmix->parsed())
            return cmd_softmix_fit(common, softmix_data, softmix_model, eta);
    } catch (const ParseError &e) {
        return report_error("validation", e.what(), kExitValidation);
    } catch (const ValidationError &e) {
        return report_error("validation", e.what(), kExitValidation);
    } catch (const std::exception &e) {
        return report_error("internal", e.what(), kExitInternal);
    }
    return kExitOk;
}

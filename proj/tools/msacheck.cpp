#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "msacheck/backend.hpp"
#include "msacheck/classify.hpp"
#include "msacheck/error.hpp"
#include "msacheck/evidence.hpp"
#include "msacheck/explain.hpp"
#include "msacheck/metrics.hpp"
#include "msacheck/native_model.hpp"
#include "msacheck/paths.hpp"
#include "msacheck/pipeline.hpp"
#include "msacheck/plot.hpp"
#include "msacheck/remote.hpp"
#include "msacheck/serialization.hpp"
#include "msacheck/service.hpp"
#include "msacheck/store.hpp"
#include "msacheck/synthetic.hpp"
#include "msacheck/text.hpp"

namespace fs = std::filesystem;
using namespace msacheck;
using nlohmann::json;

namespace {

struct Globals {
  std::string config;
  std::string backend;
  std::string model;
  std::string endpoint;
  std::string template_style;
  std::optional<std::size_t> budget;
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
};

PipelineConfig resolve(const Globals& g) {
  PipelineConfig c;
  c.backend.model_path = (data_dir() / "sample" / "model.json").string();
  if (!g.config.empty()) c = load_config(g.config, c);
  if (!g.backend.empty()) {
    if (g.backend == "native") c.backend.kind = BackendKind::NativeLinear;
    else if (g.backend == "remote") c.backend.kind = BackendKind::RemoteYesNo;
    else throw Error(ErrorKind::ConfigError, "--backend must be native or remote");
  }
  if (!g.model.empty()) c.backend.model_path = g.model;
  if (!g.endpoint.empty()) c.backend.endpoint = g.endpoint;
  if (c.backend.kind == BackendKind::RemoteYesNo && (c.backend.template_ids.empty() || !g.template_style.empty())) {
    auto style = parse_prompt_style(g.template_style.empty() ? "cot_few_shot" : g.template_style);
    if (!style) throw Error(ErrorKind::ConfigError, "unknown --template-style " + g.template_style);
    for (auto cr : kCriteria) c.backend.template_ids[cr] = template_id(*style, cr);
  }
  if (g.budget) c.context_budget = *g.budget;
  if (g.threshold) c.thresholds.fallback = *g.threshold;
  if (g.seed) c.seed = *g.seed;
  c.validate();
  return c;
}

std::shared_ptr<const RelevanceBackend> backend_for(const PipelineConfig& c) {
  return make_backend(c.backend);
}

void write_text(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::NotFound, "cannot write " + path);
  out << body;
}

ContextWindow literal_context(const std::string& before, const std::string& after) {
  ContextWindow ctx;
  ctx.before_text = before;
  ctx.after_text = after;
  ctx.budget = text::count_words(before) + text::count_words(after);
  return ctx;
}

std::vector<LabeledExample> read_labeled(const fs::path& path) {
  std::vector<LabeledExample> out;
  std::size_t n = 0;
  for (const auto& line : read_jsonl_lines(path)) {
    ++n;
    parse_guard([&] {
      auto j = json::parse(line);
      LabeledExample ex;
      ex.sentence = j.at("sentence").get<std::string>();
      ex.context = literal_context(j.value("before", std::string()), j.value("after", std::string()));
      for (const auto& name : j.at("labels")) ex.labels[index_of(criterion_from_string(name.get<std::string>()))] = true;
      out.push_back(std::move(ex));
    });
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence-level compliance checking for modern slavery statements"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--backend", g.backend, "native | remote");
  app.add_option("--model", g.model, "native model file");
  app.add_option("--endpoint", g.endpoint, "remote classifier URL");
  app.add_option("--template-style", g.template_style, "zero_shot | cot_zero_shot | cot_few_shot");
  app.add_option("--context-budget", g.budget, "context words around the target sentence");
  app.add_option("--threshold", g.threshold, "relevance threshold");
  app.add_option("--seed", g.seed, "seed for sampling and training");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Segment statements JSONL and print the stored form");
  std::string ingest_in, ingest_out;
  ingest->add_option("input", ingest_in, "statements JSONL")->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--out", ingest_out, "output file (default stdout)");

  // train
  auto* train = app.add_subcommand("train", "Train the native linear model");
  std::string train_corpus, train_out;
  std::size_t synthetic_n = 0;
  TrainingConfig tc;
  std::string batch_mode;
  train->add_option("--corpus", train_corpus, "labelled JSONL {sentence, before, after, labels}");
  train->add_option("--synthetic", synthetic_n, "generate a separable corpus with N positives per criterion");
  train->add_option("-o,--out", train_out, "model file")->required();
  train->add_option("--epochs", tc.epochs);
  train->add_option("--learning-rate", tc.learning_rate);
  train->add_option("--batch-size", tc.batch_size, "0 = full batch");
  train->add_option("--l2", tc.l2);
  train->add_option("--dimension", tc.dimension)->check([](const std::string& s) {
    auto v = std::stoull(s);
    return (v >= 2 && (v & (v - 1)) == 0) ? std::string() : std::string("dimension must be a power of two");
  });

  // classify
  auto* classify = app.add_subcommand("classify", "Predict relevance for every sentence and criterion");
  std::string classify_in, classify_out;
  classify->add_option("input", classify_in, "statements JSONL")->required()->check(CLI::ExistingFile);
  classify->add_option("-o,--out", classify_out, "predictions JSONL (default stdout)");

  // explain
  auto* explain = app.add_subcommand("explain", "Token Shapley attributions for one sentence");
  std::string ex_sentence, ex_criterion, ex_before, ex_after, ex_space = "probability";
  std::size_t ex_budget = 2048;
  explain->add_option("--sentence", ex_sentence)->required();
  explain->add_option("--criterion", ex_criterion)->required();
  explain->add_option("--before", ex_before, "context before the sentence");
  explain->add_option("--after", ex_after, "context after the sentence");
  explain->add_option("--space", ex_space, "probability | margin");
  explain->add_option("--kernel-budget", ex_budget);

  // evidence
  auto* evidence = app.add_subcommand("evidence", "Evidence status detectors for one sentence");
  std::string ev_sentence, ev_criterion;
  evidence->add_option("--sentence", ev_sentence)->required();
  evidence->add_option("--criterion", ev_criterion)->required();

  // report
  auto* report = app.add_subcommand("report", "Compliance fractions and a trend table from a bundle");
  std::string rep_bundle, rep_facet = "sector";
  bool rep_json = false;
  report->add_option("bundle", rep_bundle, "bundle directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--facet", rep_facet, "sector | turnover | year");
  report->add_flag("--json", rep_json);

  // run / export
  auto* run = app.add_subcommand("run", "Run the full pipeline over a statements JSONL");
  std::string run_in, run_out;
  run->add_option("input", run_in)->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", run_out, "write the export bundle here");

  auto* exp = app.add_subcommand("export", "Write the export bundle for a statements JSONL or re-export a bundle");
  std::string exp_in, exp_out;
  exp->add_option("input", exp_in)->required()->check(CLI::ExistingPath);
  exp->add_option("-o,--out", exp_out)->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string srv_host = "127.0.0.1", srv_bundle, srv_input;
  int srv_port = 8080;
  serve->add_option("--host", srv_host);
  serve->add_option("--port", srv_port);
  serve->add_option("--bundle", srv_bundle, "preload a bundle")->check(CLI::ExistingDirectory);
  serve->add_option("--input", srv_input, "preload and run a statements JSONL")->check(CLI::ExistingFile);

  // plot
  auto* plot = app.add_subcommand("plot", "SVG plots: attribution heatmap or reliability diagram");
  std::string plot_kind, plot_in, plot_out, plot_statement, plot_criterion;
  std::size_t plot_sentence = 0;
  plot->add_option("kind", plot_kind, "attribution | reliability")->required();
  plot->add_option("input", plot_in, "bundle dir (attribution) or JSONL of {probability, label} (reliability)")
      ->required();
  plot->add_option("--statement", plot_statement);
  plot->add_option("--sentence", plot_sentence);
  plot->add_option("--criterion", plot_criterion);
  plot->add_option("-o,--out", plot_out);

  // prompt
  auto* prompt = app.add_subcommand("prompt", "Render a remote-classifier prompt");
  std::string pr_template, pr_sentence, pr_context;
  prompt->add_option("--template", pr_template, "e.g. cot_few_shot/C2_SupplyChains")->required();
  prompt->add_option("--sentence", pr_sentence)->required();
  prompt->add_option("--context", pr_context);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::string out;
      int bad = 0;
      std::size_t line_no = 0;
      for (const auto& line : read_jsonl_lines(ingest_in)) {
        ++line_no;
        try {
          auto in = parse_statement_input(line);
          out += json(ingest_statement(std::move(in.text), in.metadata, in.id)).dump() + "\n";
        } catch (const Error& e) {
          ++bad;
          std::cerr << "line " << line_no << ": " << e.what() << '\n';
        }
      }
      write_text(ingest_out, out);
      return bad == 0 ? 0 : 2;
    }

    if (*train) {
      if (g.seed) tc.seed = *g.seed;
      std::vector<LabeledExample> data;
      if (!train_corpus.empty()) {
        data = read_labeled(train_corpus);
      } else if (synthetic_n > 0) {
        SyntheticCorpusOptions so;
        so.per_criterion = synthetic_n;
        so.negatives = synthetic_n;
        so.seed = tc.seed;
        data = synthetic_corpus(so);
      } else {
        throw Error(ErrorKind::InvalidArgument, "train needs --corpus or --synthetic");
      }
      auto model = train_native(data, tc);
      model.save(train_out);
      for (auto c : kCriteria) {
        std::printf("%-20s final loss %.6f\n", std::string(to_string(c)).c_str(), model.head(c).final_loss);
      }
      return 0;
    }

    if (*prompt) {
      auto lib = PromptLibrary::load_default();
      std::cout << lib.render(pr_template, pr_sentence, pr_context.empty() ? pr_sentence : pr_context);
      return 0;
    }

    if (*evidence) {
      const auto c = criterion_from_string(ev_criterion);
      auto cfg = resolve(g);
      std::shared_ptr<const NliClient> nli;
      if (cfg.nli) nli = std::make_shared<const NliClient>(*cfg.nli);
      EvidenceTracker tracker(CueLexicon::defaults(), nli);
      Sentence s{0, {0, ev_sentence.size()}, ev_sentence, text::count_words(ev_sentence)};
      RelevancePrediction rel;
      rel.criterion = c;
      rel.relevant = true;
      rel.probability = 1.0;
      std::cout << json(tracker.evidence_status(s, c, rel)).dump(2) << '\n';
      return 0;
    }

    if (*report) {
      Store store;
      store.import_bundle(rep_bundle);
      auto facet = parse_facet(rep_facet);
      if (!facet) throw Error(ErrorKind::InvalidArgument, "facet must be sector, turnover or year");
      const auto ids = store.statement_ids();
      if (rep_json) {
        std::cout << run_report(store, ids, *facet).dump(2) << '\n';
      } else {
        const auto outs = outcomes(store, ids);
        std::printf("compliance over %zu statements\n", outs.size());
        for (auto c : kCriteria) {
          std::printf("  %-20s %.3f\n", std::string(to_string(c)).c_str(), compliance_fraction(outs, c));
        }
        std::cout << '\n' << to_table(trend_report(outs, *facet));
      }
      return 0;
    }

    if (*plot) {
      std::string svg;
      if (plot_kind == "attribution") {
        Store store;
        store.import_bundle(plot_in);
        const auto rec = store.get_record(plot_statement);
        const auto c = criterion_from_string(plot_criterion);
        auto it = rec.attributions.find(CellKey{c, plot_sentence});
        if (it == rec.attributions.end()) throw Error(ErrorKind::NotFound, "no attribution for that cell");
        svg = attribution_svg(it->second, plot_statement + " / sentence " + std::to_string(plot_sentence) +
                                              " / " + plot_criterion);
      } else if (plot_kind == "reliability") {
        std::vector<double> probs;
        std::vector<bool> labels;
        for (const auto& line : read_jsonl_lines(plot_in)) {
          parse_guard([&] {
            auto j = json::parse(line);
            probs.push_back(j.at("probability").get<double>());
            labels.push_back(j.at("label").get<int>() != 0);
          });
        }
        svg = reliability_svg(calibration(probs, labels), "reliability");
      } else {
        throw Error(ErrorKind::InvalidArgument, "plot kind must be attribution or reliability");
      }
      write_text(plot_out, svg);
      return 0;
    }

    if (*exp && fs::is_directory(exp_in)) {
      Store store;
      store.import_bundle(exp_in);
      store.export_bundle(exp_out);
      return 0;
    }

    const auto cfg = resolve(g);
    auto backend = backend_for(cfg);

    if (*classify) {
      std::string out;
      for (const auto& line : read_jsonl_lines(classify_in)) {
        auto in = parse_statement_input(line);
        auto st = ingest_statement(std::move(in.text), in.metadata, in.id);
        auto m = predict_statement(*backend, st, cfg.context_budget, cfg.thresholds);
        for (auto c : kCriteria) {
          for (std::size_t i = 0; i < m.sentence_count(); ++i) {
            out += prediction_record(st.id, c, i, m.at(c, i)).dump() + "\n";
          }
        }
      }
      write_text(classify_out, out);
      return 0;
    }

    if (*explain) {
      ExplainOptions eo;
      eo.kernel_budget = ex_budget;
      eo.seed = cfg.seed;
      if (ex_space == "margin") eo.space = OutputSpace::Margin;
      else if (ex_space != "probability") throw Error(ErrorKind::InvalidArgument, "--space must be probability or margin");
      auto a = explain_prediction(*backend, ex_sentence, literal_context(ex_before, ex_after),
                                  criterion_from_string(ex_criterion), eo);
      std::cout << json(a).dump(2) << '\n';
      return 0;
    }

    Pipeline pipeline(backend, cfg);

    if (*run || *exp) {
      Store store;
      auto result = pipeline.run_file(*run ? run_in : exp_in, store);
      const std::string out_dir = *run ? run_out : exp_out;
      if (!out_dir.empty()) store.export_bundle(out_dir);
      if (*run) std::cout << to_json(result).dump(2) << '\n';
      return result.failures() == 0 ? 0 : 2;
    }

    if (*serve) {
      Store store;
      if (!srv_bundle.empty()) store.import_bundle(srv_bundle);
      auto shared = std::make_shared<const Pipeline>(pipeline);
      if (!srv_input.empty()) {
        auto r = shared->run_file(srv_input, store);
        std::cerr << "preloaded " << r.statement_ids.size() << " statements (" << r.run_id << ")\n";
      }
      Service service(store, shared);
      std::cerr << "listening on http://" << srv_host << ':' << srv_port << '\n';
      service.listen(srv_host, srv_port);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

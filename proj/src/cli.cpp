// Copyright 2026 The Winground Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "winground/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "winground/adapter.hpp"
#include "winground/error.hpp"
#include "winground/evaluation.hpp"
#include "winground/feature_store.hpp"
#include "winground/pipeline.hpp"
#include "winground/synthgen.hpp"

namespace winground {
namespace {

struct GroundArgs {
  std::string features;
  std::string queries;
  std::string out;
  std::string adapter;
  std::string proposals_from;
  RunConfig run;
  std::size_t threads = 1;
};

struct SweepArgs {
  GroundArgs ground;
  std::string annotations;
  std::vector<std::size_t> ks = {1, 2, 5, 10, 20};
};

struct TrainArgs {
  std::string features;
  std::string queries;
  std::string annotations;
  std::string out;
  std::string log;
  TrainConfig train;
  bool cosine = false;
};

struct EvalArgs {
  std::string predictions;
  std::string annotations;
  std::vector<double> thresholds = {0.3, 0.5};
  std::vector<std::size_t> ns = {1, 5};
  std::string json_out;
};

struct SynthArgs {
  std::string out;
  SynthConfig cfg;
  bool no_snap = false;
};

void add_ground_options(CLI::App* cmd, GroundArgs& a) {
  auto& loc = a.run.localize;
  cmd->add_option("--features", a.features, "Directory of .conef files")
      ->required();
  cmd->add_option("--queries", a.queries, "Query file (JSON lines)")
      ->required();
  cmd->add_option("--adapter", a.adapter, "Adapter weight file");
  cmd->add_option("--proposals-from", a.proposals_from,
                  "External proposal file; bypasses the anchor generator");
  cmd->add_option("--window-length", loc.window_length, "Window length L_w")
      ->capture_default_str();
  cmd->add_option("--topk", loc.topk, "Windows kept by the pre-filter")
      ->capture_default_str();
  cmd->add_option("--nms-iou", loc.nms_iou, "NMS IoU threshold")
      ->capture_default_str();
  cmd->add_option("--max-keep", loc.max_keep, "Predictions kept per query")
      ->capture_default_str();
  cmd->add_option("--anchor-lengths", loc.anchors.lengths,
                  "Anchor lengths in frames, ascending")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--anchor-stride", loc.anchors.stride, "Anchor stride")
      ->capture_default_str();
  cmd->add_option("--margin", a.run.margin, "Frame-level hinge margin")
      ->capture_default_str();
  cmd->add_option("--seed", a.run.seed, "Seed")->capture_default_str();
  cmd->add_flag("--cosine", a.run.cosine,
                "L2-normalize frame and query embeddings at load");
  cmd->add_flag("--per-window-norm", loc.per_window_norm,
                "Min-max normalize per window instead of per query");
  cmd->add_option("--threads", a.threads, "Query-level worker threads")
      ->capture_default_str();
}

struct LoadedInputs {
  VideoStore store;
  std::vector<QueryFeatures> queries;
  AdapterParams adapter;
  std::optional<std::vector<Proposal>> external;
};

LoadedInputs load_inputs(GroundArgs& a) {
  LoadedInputs in;
  VideoStore raw = VideoStore::load_directory(a.features);
  if (raw.size() == 0) {
    fail(ErrorKind::kIo, "no .conef files in " + a.features);
  }
  if (a.run.cosine) {
    for (const auto& [id, vf] : raw) in.store.add(l2_normalized(vf));
  } else {
    in.store = std::move(raw);
  }
  in.queries = load_queries(a.queries);
  if (a.run.cosine) {
    for (auto& q : in.queries) q = l2_normalized(q);
  }
  const std::size_t dim = in.store.begin()->second.dim();
  if (!a.adapter.empty()) {
    in.adapter = load_adapter(a.adapter);
    a.run.adapter_path = a.adapter;
  } else {
    in.adapter = identity_adapter(dim);
  }
  if (!a.proposals_from.empty()) {
    a.run.proposals_path = a.proposals_from;
    in.external = ingest_external_proposals(
        a.proposals_from,
        make_window_resolver(in.store, in.queries,
                             a.run.localize.window_length));
  }
  return in;
}

int cmd_ground(GroundArgs& a, std::ostream& out) {
  validate(a.run.localize);
  LoadedInputs in = load_inputs(a);
  const GroundingRun run =
      ground_all(in.queries, in.store, in.adapter, a.run.localize,
                 in.external ? &*in.external : nullptr, a.threads);
  std::vector<std::string> order;
  for (const auto& q : in.queries) order.push_back(q.query_id);
  save_predictions(to_prediction_set(run, a.run.to_json()), order, a.out);
  out << "queries: " << in.queries.size() << '\n'
      << "windows scored/total: " << run.efficiency.windows_scored << '/'
      << run.efficiency.windows_total << " (reduction "
      << std::setprecision(4) << run.efficiency.reduction_ratio() << ")\n"
      << "wrote " << a.out << '\n';
  return kExitOk;
}

int cmd_sweep(SweepArgs& a, std::ostream& out) {
  if (a.ks.empty()) fail(ErrorKind::kConfig, "--ks needs at least one value");
  validate(a.ground.run.localize);
  LoadedInputs in = load_inputs(a.ground);
  const auto anns = load_annotations(a.annotations);

  std::ofstream csv(a.ground.out, std::ios::trunc);
  if (!csv) fail(ErrorKind::kIo, "cannot write " + a.ground.out);
  auto header = a.ground.run.to_json();
  header.erase("topk");
  csv << "# run_config=" << header.dump() << '\n';
  csv << "k,R1@0.3,R1@0.5,windows_scored,windows_total\n";
  out << std::setw(4) << "k" << std::setw(10) << "R1@0.3" << std::setw(10)
      << "R1@0.5" << std::setw(16) << "windows_scored" << '\n';
  for (std::size_t k : a.ks) {
    LocalizeConfig cfg = a.ground.run.localize;
    cfg.topk = k;
    const GroundingRun run =
        ground_all(in.queries, in.store, in.adapter, cfg,
                   in.external ? &*in.external : nullptr, a.ground.threads);
    const PredictionSet preds = to_prediction_set(run, {});
    const double r03 = recall_at(preds, anns, 1, 0.3);
    const double r05 = recall_at(preds, anns, 1, 0.5);
    std::ostringstream row;
    row << k << ',' << std::setprecision(17) << r03 << ',' << r05 << ','
        << run.efficiency.windows_scored << ',' << run.efficiency.windows_total;
    csv << row.str() << '\n';
    out << std::setw(4) << k << std::fixed << std::setprecision(4)
        << std::setw(10) << r03 << std::setw(10) << r05 << std::setw(16)
        << run.efficiency.windows_scored << '\n';
    out.unsetf(std::ios::fixed);
  }
  if (!csv) fail(ErrorKind::kIo, "short write to " + a.ground.out);
  return kExitOk;
}

int cmd_train(TrainArgs& a, std::ostream& out) {
  VideoStore raw = VideoStore::load_directory(a.features);
  VideoStore store;
  if (a.cosine) {
    for (const auto& [id, vf] : raw) store.add(l2_normalized(vf));
  } else {
    store = std::move(raw);
  }
  auto queries = load_queries(a.queries);
  if (a.cosine) {
    for (auto& q : queries) q = l2_normalized(q);
  }
  const auto anns = load_annotations(a.annotations);
  const auto examples = make_training_examples(store, queries, anns);
  const TrainResult result = train_adapter(examples, a.train);

  nlohmann::ordered_json cfg;
  cfg["epochs"] = a.train.epochs;
  cfg["lr"] = a.train.lr;
  cfg["batch"] = a.train.batch;
  cfg["hidden"] = result.params.hidden();
  cfg["temperature"] = a.train.temperature;
  cfg["seed"] = a.train.seed;
  cfg["cosine"] = a.cosine;
  cfg["negatives"] = "in-batch, across videos";
  nlohmann::ordered_json extra;
  extra["train_config"] = cfg;
  extra["epoch_loss"] = result.epoch_loss;
  save_adapter(result.params, a.out, extra);

  if (!a.log.empty()) {
    std::ofstream log(a.log, std::ios::trunc);
    if (!log) fail(ErrorKind::kIo, "cannot write " + a.log);
    log << "epoch,mean_nce_loss\n" << std::setprecision(17);
    for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
      log << e + 1 << ',' << result.epoch_loss[e] << '\n';
    }
  }
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    out << "epoch " << e + 1 << " loss " << std::setprecision(6)
        << result.epoch_loss[e] << '\n';
  }
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

int cmd_eval(EvalArgs& a, std::ostream& out) {
  const PredictionSet preds = load_predictions(a.predictions);
  const auto anns = load_annotations(a.annotations);
  const EvalReport report = evaluate(preds, anns, a.thresholds, a.ns);
  out << format_table(report);
  if (!a.json_out.empty()) {
    std::ofstream os(a.json_out, std::ios::trunc);
    if (!os) fail(ErrorKind::kIo, "cannot write " + a.json_out);
    os << to_json(report).dump(1) << '\n';
  }
  return kExitOk;
}

int cmd_gen_synth(SynthArgs& a, std::ostream& out) {
  if (a.no_snap) a.cfg.snap_stride = 0;
  const SynthCorpus corpus = generate_corpus(a.cfg);
  write_corpus(corpus, a.out);
  nlohmann::ordered_json j;
  j["videos"] = a.cfg.num_videos;
  j["queries_per_video"] = a.cfg.queries_per_video;
  j["video_length"] = a.cfg.video_length;
  j["dim"] = a.cfg.dim;
  j["snr"] = a.cfg.snr;
  j["gt_min"] = a.cfg.gt_min;
  j["gt_max"] = a.cfg.gt_max;
  j["feature_hz"] = a.cfg.feature_hz;
  j["seed"] = a.cfg.seed;
  j["snap_stride"] = a.cfg.snap_stride;
  j["regenerations"] = corpus.regenerations;
  std::ofstream os(std::filesystem::path(a.out) / "synth_config.json",
                   std::ios::trunc);
  os << j.dump(1) << '\n';
  if (!os) fail(ErrorKind::kIo, "cannot write synth_config.json");
  out << "wrote " << corpus.videos.size() << " videos, "
      << corpus.queries.size() << " queries to " << a.out;
  if (corpus.regenerations > 0) {
    out << " (" << corpus.regenerations << " videos redrawn)";
  }
  out << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Coarse-to-fine temporal grounding over long videos",
               "winground"};
  app.require_subcommand(1);

  GroundArgs ground;
  auto* ground_cmd =
      app.add_subcommand("ground", "Localize every query; write predictions");
  add_ground_options(ground_cmd, ground);
  ground_cmd->add_option("--out", ground.out, "Predictions file")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand(
      "sweep-k", "Recall and window cost for a range of pre-filter budgets");
  add_ground_options(sweep_cmd, sweep.ground);
  sweep_cmd->add_option("--annotations", sweep.annotations)->required();
  sweep_cmd->add_option("--ks", sweep.ks, "Budgets to sweep")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep.ground.out, "CSV file")->required();

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train-adapter", "Train the visual adapter with NCE");
  train_cmd->add_option("--features", train.features)->required();
  train_cmd->add_option("--queries", train.queries)->required();
  train_cmd->add_option("--annotations", train.annotations)->required();
  train_cmd->add_option("--out", train.out, "Weight file")->required();
  train_cmd->add_option("--log", train.log, "Per-epoch loss CSV");
  train_cmd->add_option("--epochs", train.train.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train.train.lr)->capture_default_str();
  train_cmd->add_option("--batch", train.train.batch)->capture_default_str();
  train_cmd->add_option("--adapter-hidden", train.train.hidden,
                        "Bottleneck width; 0 selects dim/2")
      ->capture_default_str();
  train_cmd->add_option("--temperature", train.train.temperature)
      ->capture_default_str();
  train_cmd->add_option("--seed", train.train.seed)->capture_default_str();
  train_cmd->add_flag("--cosine", train.cosine);

  EvalArgs eval;
  auto* eval_cmd =
      app.add_subcommand("eval", "Recall@n for IoU thresholds");
  eval_cmd->add_option("--predictions", eval.predictions)->required();
  eval_cmd->add_option("--annotations", eval.annotations)->required();
  eval_cmd->add_option("--thresholds", eval.thresholds)
      ->delimiter(',')
      ->capture_default_str();
  eval_cmd->add_option("--ns", eval.ns)->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--json", eval.json_out, "Write the report as JSON");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand(
      "gen-synth", "Generate a synthetic corpus with planted moments");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--videos", synth.cfg.num_videos)->capture_default_str();
  synth_cmd->add_option("--queries", synth.cfg.queries_per_video,
                        "Queries per video")
      ->capture_default_str();
  synth_cmd->add_option("--video-len", synth.cfg.video_length)
      ->capture_default_str();
  synth_cmd->add_option("--dim", synth.cfg.dim)->capture_default_str();
  synth_cmd->add_option("--snr", synth.cfg.snr)->capture_default_str();
  synth_cmd->add_option("--gt-min", synth.cfg.gt_min)->capture_default_str();
  synth_cmd->add_option("--gt-max", synth.cfg.gt_max)->capture_default_str();
  synth_cmd->add_option("--feature-hz", synth.cfg.feature_hz)
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.cfg.seed)->capture_default_str();
  synth_cmd->add_option("--anchor-stride", synth.cfg.snap_stride,
                        "Lattice that planted starts snap to")
      ->capture_default_str();
  synth_cmd->add_flag("--no-snap", synth.no_snap);

  std::vector<std::string> argv_store{"winground"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (ground_cmd->parsed()) return cmd_ground(ground, out);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep, out);
    if (train_cmd->parsed()) return cmd_train(train, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (synth_cmd->parsed()) return cmd_gen_synth(synth, out);
  } catch (const Error& e) {
    err << "winground: " << e.what() << '\n';
    return e.kind() == ErrorKind::kConfig ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    err << "winground: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace winground

// facepix command line: run the pixelation pipeline, or drive individual
// stages (clustering, the ELR two-sample test, scenario synthesis,
// evaluation, segment-length sweeps) on their file formats.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "facepix/ap_cluster.hpp"
#include "facepix/container.hpp"
#include "facepix/elr.hpp"
#include "facepix/engine.hpp"
#include "facepix/metrics.hpp"
#include "facepix/records.hpp"
#include "facepix/synthetic.hpp"

namespace {

using namespace facepix;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct RunInputs {
  FrameStream stream;
  std::unique_ptr<VectorProvider> provider;
  std::unique_ptr<SyntheticDataset> dataset;  // kept alive for synthetic runs
  AnnotationSet annotations;
  bool have_annotations = false;
};

RunInputs load_run_inputs(const Config& cfg, EngineConfig& engine) {
  RunInputs in;
  const std::string mode = cfg.get("provider", std::string("file"));
  if (mode == "synth") {
    const std::string scenario_path = cfg.get("scenario", std::string());
    if (scenario_path.empty()) throw std::runtime_error("provider=synth needs scenario=<path>");
    const SyntheticScenario sc = SyntheticScenario::from_file(scenario_path);
    engine.embedding_dim = sc.embedding_dim;
    in.dataset = std::make_unique<SyntheticDataset>(synth_generate(sc));
    in.stream = in.dataset->stream;
    in.annotations = in.dataset->annotations;
    in.have_annotations = true;
    if (!engine.streamer_bbox) {
      for (std::size_t p = 0; p < sc.persons.size(); ++p) {
        if (!sc.persons[p].streamer) continue;
        engine.streamer_bbox = path_box_at(sc.persons[p], engine.streamer_frame);
        break;
      }
    }
    in.provider = std::make_unique<SyntheticProvider>(*in.dataset);
  } else if (mode == "file") {
    const std::string container = cfg.get("input", std::string());
    if (container.empty()) throw std::runtime_error("provider=file needs input=<container.fpvl>");
    in.stream = read_frame_container(container);
    auto detections = read_detections(cfg.get("detections", std::string()), engine.embedding_dim);
    std::vector<Candidate> candidates;
    if (cfg.has("candidates")) candidates = read_candidates(cfg.get("candidates", std::string()));
    in.provider = std::make_unique<FileProvider>(std::move(detections), std::move(candidates),
                                                 in.stream.frame_count());
    if (cfg.has("annotations")) {
      in.annotations = read_annotations(cfg.get("annotations", std::string()));
      in.have_annotations = true;
    }
  } else {
    throw std::runtime_error("provider must be 'file' or 'synth', got " + mode);
  }
  return in;
}

int cmd_run(const std::string& config_path, bool refine_on, bool refine_off,
            const std::string& out_path, const std::string& report_path,
            const std::string& boxes_path, const std::string& log_path) {
  Config cfg = Config::from_file(config_path);
  EngineConfig engine = EngineConfig::from(cfg);
  if (refine_on) engine.refine = true;
  if (refine_off) engine.refine = false;

  RunInputs in = load_run_inputs(cfg, engine);
  RunResult res = run_pipeline(in.stream, *in.provider, engine);

  if (!out_path.empty()) write_frame_container(out_path, res.output);
  if (!boxes_path.empty()) write_output_boxes(boxes_path, res.boxes);
  if (!log_path.empty()) write_text(log_path, res.log.to_text(engine.segment_frames, engine.fps));

  for (const std::string& w : res.log.warnings) std::cerr << "warning: " << w << '\n';

  if (in.have_annotations) {
    const MetricsReport report = evaluate(res.boxes, in.annotations, cfg.get("eval_iou_floor", 0.3));
    const std::string text = report.to_text();
    if (!report_path.empty()) {
      write_text(report_path, text);
      std::cout << report_path << '\n';
    } else {
      std::cout << text;
    }
  } else if (!report_path.empty()) {
    std::cerr << "warning: no annotations available, report not written\n";
  }

  return res.log.lag_violations == 0 ? 0 : 1;
}

int cmd_cluster(const std::string& detections_path, int embedding_dim, int segment_frames,
                const std::string& config_path) {
  Config cfg = config_path.empty() ? Config() : Config::from_file(config_path);
  EngineConfig engine = EngineConfig::from(cfg);
  if (embedding_dim > 0) engine.embedding_dim = embedding_dim;
  if (segment_frames > 0) engine.segment_frames = segment_frames;

  const auto detections = read_detections(detections_path, engine.embedding_dim);
  ap::IncrementalClusterer clusterer(engine.cluster);

  std::int64_t max_frame = 0;
  for (const auto& d : detections) max_frame = std::max(max_frame, d.frame_index);
  const auto segments = segmentize(max_frame + 1, engine.segment_frames);

  std::size_t cursor = 0;
  std::vector<std::pair<const FaceVector*, int>> labelled;
  for (const Segment& seg : segments) {
    std::vector<FaceVector> batch;
    while (cursor < detections.size() && detections[cursor].frame_index < seg.end_frame())
      batch.push_back(detections[cursor++]);
    const auto res = clusterer.cluster_segment(batch, seg.index);
    const std::size_t base = cursor - batch.size();
    for (std::size_t i = 0; i < batch.size(); ++i)
      labelled.emplace_back(&detections[base + i], res.labels[i]);
  }
  std::cout << "# frame,person_id,x,y,w,h\n";
  for (const auto& [d, person] : labelled)
    std::printf("%lld,%d,%g,%g,%g,%g\n", static_cast<long long>(d->frame_index), person, d->bbox.x,
                d->bbox.y, d->bbox.w, d->bbox.h);
  return 0;
}

int cmd_elr_test(const std::string& a_path, const std::string& b_path, double confidence,
                 double threshold_override) {
  auto a = read_feature_rows(a_path);
  auto b = read_feature_rows(b_path);
  if (b.size() > a.size()) throw std::runtime_error("sample B must not be longer than sample A");
  a.resize(b.size());  // first |B| rows of A pair with B in time order

  const double threshold =
      threshold_override > 0.0 ? threshold_override : chi2_quantile_df1(confidence);
  const ELRResult res = elr_two_sample_test(a, b, threshold);
  std::printf("pairs=%zu\n", res.h.size());
  std::printf("lambda=%s\n", res.lambda_found ? std::to_string(res.lambda).c_str() : "none");
  std::printf("t_elr=%.12g\n", res.t_elr);
  std::printf("threshold=%.12g\n", res.threshold);
  std::printf("decision=%s\n", res.decision == TestDecision::accept ? "accept" : "reject");
  if (!res.reason.empty()) std::printf("reason=%s\n", res.reason.c_str());
  return res.decision == TestDecision::accept ? 0 : 1;
}

int cmd_synth(const std::string& scenario_path, const std::string& prefix) {
  const SyntheticScenario sc = SyntheticScenario::from_file(scenario_path);
  const SyntheticDataset ds = synth_generate(sc);
  write_frame_container(prefix + ".fpvl", ds.stream);
  write_detections(prefix + ".detections.txt", ds.all_detections());
  write_candidates(prefix + ".candidates.txt", ds.all_candidates());
  write_annotations(prefix + ".annotations.csv", ds.annotations);
  std::cout << prefix << ".fpvl\n"
            << prefix << ".detections.txt\n"
            << prefix << ".candidates.txt\n"
            << prefix << ".annotations.csv\n";
  return 0;
}

int cmd_eval(const std::string& boxes_path, const std::string& annotations_path, double iou_floor,
             const std::string& report_path) {
  const auto boxes = read_output_boxes(boxes_path);
  const auto ann = read_annotations(annotations_path);
  const MetricsReport report = evaluate(boxes, ann, iou_floor);
  const std::string text = report.to_text();
  if (!report_path.empty()) {
    write_text(report_path, text);
    std::cout << report_path << '\n';
  } else {
    std::cout << text;
  }
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& lengths_csv,
              const std::string& report_path) {
  const SyntheticScenario sc = SyntheticScenario::from_file(scenario_path);
  const SyntheticDataset ds = synth_generate(sc);
  const SyntheticProvider provider(ds);

  std::vector<int> lengths;
  {
    std::istringstream in(lengths_csv);
    std::string tok;
    while (std::getline(in, tok, ',')) lengths.push_back(std::stoi(tok));
  }

  std::ostringstream out;
  out << "# segment_frames,buffer_seconds,mfpa,mfpp,mp,opr\n";
  for (int n : lengths) {
    EngineConfig engine;
    engine.segment_frames = n;
    engine.fps = sc.fps;
    engine.embedding_dim = sc.embedding_dim;
    for (std::size_t p = 0; p < sc.persons.size(); ++p) {
      if (!sc.persons[p].streamer) continue;
      engine.streamer_bbox = path_box_at(sc.persons[p], engine.streamer_frame);
      break;
    }
    const RunResult res = run_pipeline(ds.stream, provider, engine);
    const MetricsReport rep = evaluate(res.boxes, ds.annotations);
    char line[160];
    std::snprintf(line, sizeof(line), "%d,%.3f,%s,%s,%lld,%.6f\n", n,
                  2.0 * n / sc.fps, rep.mfpa ? std::to_string(*rep.mfpa).c_str() : "absent",
                  rep.mfpp ? std::to_string(*rep.mfpp).c_str() : "absent",
                  static_cast<long long>(rep.mp), rep.opr);
    out << line;
  }
  if (!report_path.empty()) {
    write_text(report_path, out.str());
    std::cout << report_path << '\n';
  } else {
    std::cout << out.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"face pixelation pipeline for streamed video"};
  app.require_subcommand(1);

  // run
  std::string run_config, run_out, run_report, run_boxes, run_log;
  bool refine_on = false, refine_off = false;
  auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
  run->add_option("--config", run_config, "key=value config file")->required();
  run->add_option("--out", run_out, "pixelated output container (.fpvl)");
  run->add_option("--report", run_report, "metrics report path (needs annotations)");
  run->add_option("--boxes", run_boxes, "rendered mosaic log (csv)");
  run->add_option("--log", run_log, "run log path");
  run->add_flag("--refine", refine_on, "force the refinement stage on");
  run->add_flag("--no-refine", refine_off, "disable the refinement stage");

  // cluster
  std::string cl_dets, cl_config;
  int cl_dim = 0, cl_segment = 0;
  auto* cluster = app.add_subcommand("cluster", "cluster a detection file into person ids");
  cluster->add_option("--detections", cl_dets)->required();
  cluster->add_option("--embedding-dim", cl_dim, "overrides config embedding_dim");
  cluster->add_option("--segment-frames", cl_segment, "overrides config segment_frames");
  cluster->add_option("--config", cl_config);

  // elr-test
  std::string elr_a, elr_b;
  double elr_conf = 0.95, elr_thresh = 0.0;
  auto* elr = app.add_subcommand("elr-test", "two-sample test between two feature-row files");
  elr->add_option("--sample-a", elr_a, "reference sample (rows of numbers)")->required();
  elr->add_option("--sample-b", elr_b, "candidate sample")->required();
  elr->add_option("--confidence", elr_conf, "chi-square confidence level (default 0.95)");
  elr->add_option("--threshold", elr_thresh, "explicit rejection threshold (overrides confidence)");

  // synth
  std::string synth_scenario, synth_prefix;
  auto* synth = app.add_subcommand("synth", "generate a synthetic scenario's artifacts");
  synth->add_option("--scenario", synth_scenario)->required();
  synth->add_option("--out-prefix", synth_prefix)->required();

  // eval
  std::string eval_boxes, eval_ann, eval_report;
  double eval_floor = 0.3;
  auto* eval = app.add_subcommand("eval", "score an output-box log against annotations");
  eval->add_option("--boxes", eval_boxes)->required();
  eval->add_option("--annotations", eval_ann)->required();
  eval->add_option("--iou-floor", eval_floor);
  eval->add_option("--report", eval_report);

  // sweep
  std::string sweep_scenario, sweep_lengths = "30,60,90,120,150", sweep_report;
  auto* sweep = app.add_subcommand("sweep", "run the pipeline across segment lengths");
  sweep->add_option("--scenario", sweep_scenario)->required();
  sweep->add_option("--lengths", sweep_lengths, "comma-separated segment lengths");
  sweep->add_option("--report", sweep_report);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, refine_on, refine_off, run_out, run_report,
                                      run_boxes, run_log);
    if (cluster->parsed()) return cmd_cluster(cl_dets, cl_dim, cl_segment, cl_config);
    if (elr->parsed()) return cmd_elr_test(elr_a, elr_b, elr_conf, elr_thresh);
    if (synth->parsed()) return cmd_synth(synth_scenario, synth_prefix);
    if (eval->parsed()) return cmd_eval(eval_boxes, eval_ann, eval_floor, eval_report);
    if (sweep->parsed()) return cmd_sweep(sweep_scenario, sweep_lengths, sweep_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

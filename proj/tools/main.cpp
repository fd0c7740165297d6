#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cfield/episode_io.hpp"
#include "cfield/metrics.hpp"
#include "cfield/real_labeling.hpp"
#include "cfield/sdf.hpp"
#include "cfield/sim_labeling.hpp"
#include "cfield/synth.hpp"
#include "cfield/tactile.hpp"

using nlohmann::json;
using namespace cfield;

namespace {

Wrench parse_wrench_arg(const std::string& arg) {
  std::vector<double> v;
  std::stringstream ss(arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() != 6)
    throw ValidationError("wrench must be 6 comma-separated numbers: " + arg);
  Wrench w;
  w.force = {v[0], v[1], v[2]};
  w.torque = {v[3], v[4], v[5]};
  return w;
}

std::vector<std::vector<SparseContact>> read_contacts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open contacts file: " + path);
  std::vector<std::vector<SparseContact>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    std::vector<SparseContact> frame;
    for (const auto& e : j) {
      SparseContact c;
      c.position = {e.at("x")[0].get<double>(), e.at("x")[1].get<double>(),
                    e.at("x")[2].get<double>()};
      c.normal = {e.at("n")[0].get<double>(), e.at("n")[1].get<double>(),
                  e.at("n")[2].get<double>()};
      c.magnitude = e.at("F").get<double>();
      frame.push_back(c);
    }
    out.push_back(std::move(frame));
  }
  return out;
}

void write_contacts(const std::string& path,
                    const std::vector<std::vector<SparseContact>>& contacts) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& frame : contacts) {
    json j = json::array();
    for (const auto& c : frame)
      j.push_back({{"x", {c.position.x(), c.position.y(), c.position.z()}},
                   {"n", {c.normal.x(), c.normal.y(), c.normal.z()}},
                   {"F", c.magnitude}});
    out << j << '\n';
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Extrinsic contact field labeling pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic episode");
  std::string synth_config, synth_out, synth_gt, synth_contacts;
  std::uint64_t synth_seed = 0;
  bool synth_seed_set = false;
  synth->add_option("--config", synth_config, "Synth config JSON")->required();
  synth->add_option("--out", synth_out, "Episode JSONL output")->required();
  synth->add_option("--gt", synth_gt, "Ground-truth field JSONL output");
  synth->add_option("--contacts", synth_contacts, "Sparse contacts JSONL output");
  synth->add_option("--seed", synth_seed, "RNG seed override")
      ->each([&](const std::string&) { synth_seed_set = true; });

  // filter
  auto* filter = app.add_subcommand("filter", "Tactile post-processing");
  std::string filt_episode, filt_config, filt_out;
  filter->add_option("--episode", filt_episode)->required();
  filter->add_option("--filter-config", filt_config, "Filter config JSON");
  filter->add_option("--out", filt_out)->required();

  // label-sim
  auto* lsim = app.add_subcommand("label-sim", "SDF-based dense labels");
  std::string ls_scene, ls_contacts, ls_episode, ls_out;
  lsim->add_option("--scene", ls_scene, "SDF scene JSON")->required();
  lsim->add_option("--contacts", ls_contacts, "Per-frame sparse contacts JSONL")
      ->required();
  lsim->add_option("--episode", ls_episode)->required();
  lsim->add_option("--out", ls_out)->required();

  // label-real
  auto* lreal = app.add_subcommand("label-real", "Pseudo-ground-truth labels");
  std::string lr_episode, lr_config, lr_table = "from-frames", lr_out, lr_diag;
  double lr_lambda = 0.01, lr_eps = 1e-3, lr_scale = 1.0, lr_eps_h = 0.004;
  int lr_noise_window = 5, lr_threads = 1;
  lreal->add_option("--episode", lr_episode)->required();
  lreal->add_option("--filter-config", lr_config);
  lreal->add_option("--table-z", lr_table, "Height value or 'from-frames'");
  lreal->add_option("--out", lr_out)->required();
  lreal->add_option("--diagnostics", lr_diag, "Sidecar diagnostics JSONL");
  lreal->add_option("--lambda", lr_lambda);
  lreal->add_option("--eps", lr_eps);
  lreal->add_option("--eps-height", lr_eps_h, "Candidate band above table (m)");
  lreal->add_option("--scale", lr_scale, "Calibration scale");
  lreal->add_option("--noise-window", lr_noise_window,
                    "Leading contact-free frames for the gate");
  lreal->add_option("--threads", lr_threads);

  // solve-forces
  auto* sf = app.add_subcommand("solve-forces", "Per-frame force distribution");
  std::string sf_episode, sf_candidates, sf_out;
  double sf_lambda = 0.01, sf_eps = 1e-3, sf_scale = 1.0;
  sf->add_option("--episode", sf_episode)->required();
  sf->add_option("--candidates", sf_candidates,
                 "JSONL: per frame {p:[[..]], n:[[..]], c:[..]} (world frame)")
      ->required();
  sf->add_option("--lambda", sf_lambda);
  sf->add_option("--eps", sf_eps);
  sf->add_option("--scale", sf_scale, "Calibration scale");
  sf->add_option("--out", sf_out)->required();

  // eval
  auto* ev = app.add_subcommand("eval", "Metrics between two field files");
  std::string ev_pred, ev_gt, ev_report;
  ev->add_option("--pred", ev_pred)->required();
  ev->add_option("--gt", ev_gt)->required();
  ev->add_option("--report", ev_report, "Report JSON path (default stdout)");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Wrench scale alignment");
  std::string cal_obs, cal_ref;
  cal->add_option("--observed", cal_obs, "fx,fy,fz,tx,ty,tz")->required();
  cal->add_option("--reference", cal_ref, "fx,fy,fz,tx,ty,tz")->required();

  // export-ply
  auto* ply = app.add_subcommand("export-ply", "PLY visualization export");
  std::string ply_episode, ply_fields, ply_out;
  int ply_frame = 0;
  ply->add_option("--episode", ply_episode)->required();
  ply->add_option("--fields", ply_fields)->required();
  ply->add_option("--frame", ply_frame);
  ply->add_option("--out", ply_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (synth->parsed()) {
    SynthConfig cfg = read_synth_config(synth_config);
    if (synth_seed_set) cfg.rng_seed = synth_seed;
    const SynthEpisode ep = generate_episode(cfg);
    write_episode(synth_out, ep.frames);
    if (!synth_gt.empty()) write_fields(synth_gt, ep.ground_truth);
    if (!synth_contacts.empty()) write_contacts(synth_contacts, ep.contacts);
  } else if (filter->parsed()) {
    const FilterConfig cfg =
        filt_config.empty() ? FilterConfig{} : read_filter_config(filt_config);
    write_episode(filt_out, filter_episode(read_episode(filt_episode), cfg));
  } else if (lsim->parsed()) {
    const SdfScene scene = read_scene(ls_scene);
    const auto contacts = read_contacts(ls_contacts);
    const auto frames = read_episode(ls_episode);
    if (contacts.size() != frames.size())
      throw ValidationError("label-sim: contact line count != frame count");
    const SoftContactConfig soft_cfg;
    const ExtrapolationConfig ext_cfg;
    std::vector<ContactField> fields;
    for (std::size_t t = 0; t < frames.size(); ++t) {
      const auto d = batch_distance(scene, frames[t].tool_points);
      ContactField f;
      f.prob = soft_contact_prob(d, soft_cfg);
      f.force = extrapolate_forces(frames[t].tool_points, d, contacts[t], ext_cfg);
      fields.push_back(std::move(f));
    }
    write_fields(ls_out, fields);
  } else if (lreal->parsed()) {
    auto frames = read_episode(lr_episode);
    if (lr_table != "from-frames") {
      const double z = std::stod(lr_table);
      for (auto& fr : frames) fr.table_z = z;
    }
    const FilterConfig fcfg =
        lr_config.empty() ? FilterConfig{} : read_filter_config(lr_config);
    HeuristicConfig hcfg;
    hcfg.epsilon_height = lr_eps_h;
    hcfg.gate.noise_window_begin = 0;
    hcfg.gate.noise_window_end =
        std::min<int>(lr_noise_window, static_cast<int>(frames.size()));
    const auto result = label_episode_real(frames, fcfg, hcfg, {lr_scale},
                                           lr_lambda, lr_eps, lr_threads);
    write_fields(lr_out, result.fields);
    if (!lr_diag.empty()) {
      std::ofstream out(lr_diag);
      if (!out) throw IoError("cannot open for writing: " + lr_diag);
      for (const auto& d : result.diagnostics)
        out << json{{"gated", d.gated_in_contact},
                    {"candidates", d.candidate_count},
                    {"converged", d.solver_converged},
                    {"skipped", d.skipped},
                    {"wrench_residual", d.wrench_residual},
                    {"feasibility_gap", d.feasibility_gap}}
            << '\n';
    }
  } else if (sf->parsed()) {
    const auto frames = read_episode(sf_episode);
    std::ifstream in(sf_candidates);
    if (!in) throw IoError("cannot open candidates file: " + sf_candidates);
    std::ofstream out(sf_out);
    if (!out) throw IoError("cannot open for writing: " + sf_out);
    std::string line;
    std::size_t t = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (t >= frames.size())
        throw ValidationError("solve-forces: more candidate lines than frames");
      const json j = json::parse(line);
      const Frame& fr = frames[t];
      SocpProblem problem;
      problem.reg_lambda = sf_lambda;
      problem.reg_eps = sf_eps;
      problem.target = compute_wrench(fr.tactile, fr.gripper_pose, {sf_scale});
      const auto& ps = j.at("p");
      const auto& ns = j.at("n");
      const auto& cs = j.at("c");
      for (std::size_t i = 0; i < ps.size(); ++i) {
        SocpCandidate c;
        const Eigen::Vector3d pw(ps[i][0].get<double>(), ps[i][1].get<double>(),
                                 ps[i][2].get<double>());
        const Eigen::Vector3d nw(ns[i][0].get<double>(), ns[i][1].get<double>(),
                                 ns[i][2].get<double>());
        c.position = fr.gripper_pose.to_local(pw);
        c.normal = fr.gripper_pose.orientation.conjugate() * nw;
        c.prob = cs[i].get<double>();
        problem.candidates.push_back(c);
      }
      const SocpSolution sol = solve(problem);
      json forces = json::array();
      for (const auto& f : sol.forces) {
        const Eigen::Vector3d fw = fr.gripper_pose.orientation * f;
        forces.push_back({fw.x(), fw.y(), fw.z()});
      }
      out << json{{"forces", forces},
                  {"objective", sol.objective},
                  {"wrench_residual", sol.wrench_residual},
                  {"kkt_residual", sol.kkt_residual},
                  {"iterations", sol.iterations},
                  {"converged", sol.converged}}
          << '\n';
      ++t;
    }
  } else if (ev->parsed()) {
    const auto pred = read_fields(ev_pred);
    const auto gt = read_fields(ev_gt);
    if (pred.size() != gt.size())
      throw ValidationError("eval: pred/gt frame counts differ");
    std::vector<double> pred_prob;
    std::vector<int> gt_binary;
    std::vector<Eigen::Vector3d> pred_force, gt_force;
    for (std::size_t t = 0; t < pred.size(); ++t) {
      if (pred[t].size() != gt[t].size())
        throw ValidationError("eval: point counts differ at frame " +
                              std::to_string(t));
      for (std::size_t i = 0; i < pred[t].size(); ++i) {
        pred_prob.push_back(pred[t].prob[i]);
        gt_binary.push_back(gt[t].prob[i] >= 0.5 ? 1 : 0);
        pred_force.push_back(pred[t].force[i]);
        gt_force.push_back(gt[t].force[i]);
      }
    }
    const LossConfig cfg;
    const auto loss = composite_loss(pred_prob, pred_force, gt_binary, gt_force, cfg);
    const json report{{"f1", f1_score(pred_prob, gt_binary)},
                      {"force_mse", force_mse(pred_force, gt_force)},
                      {"loss_total", loss.total},
                      {"loss_prob", loss.prob},
                      {"loss_mag", loss.mag},
                      {"loss_dir", loss.dir}};
    if (ev_report.empty()) {
      std::cout << report.dump(2) << '\n';
    } else {
      std::ofstream out(ev_report);
      if (!out) throw IoError("cannot open for writing: " + ev_report);
      out << report.dump(2) << '\n';
    }
  } else if (cal->parsed()) {
    const auto scale = calibrate(parse_wrench_arg(cal_obs), parse_wrench_arg(cal_ref));
    std::cout << json{{"scale", scale.scale}}.dump() << '\n';
  } else if (ply->parsed()) {
    const auto frames = read_episode(ply_episode);
    const auto fields = read_fields(ply_fields);
    if (ply_frame < 0 || ply_frame >= static_cast<int>(frames.size()) ||
        ply_frame >= static_cast<int>(fields.size()))
      throw ValidationError("export-ply: frame index out of range");
    export_ply(ply_out, frames[ply_frame].tool_points, fields[ply_frame]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

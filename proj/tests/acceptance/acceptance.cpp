// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "common/error.hpp"
#include "common/math.hpp"
#include "conditioning/conditioning.hpp"
#include "hand_geometry/hand_model.hpp"
#include "metrics/frechet.hpp"
#include "metrics/image_metrics.hpp"
#include "metrics/motion.hpp"
#include "metrics/pose_metrics.hpp"
#include "pipeline/commands.hpp"
#include "pipeline/config.hpp"
#include "pipeline/manifest.hpp"
#include "pipeline/report.hpp"
#include "raster/camera.hpp"
#include "raster/rasterizer.hpp"
#include "trajectory/trajectory.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

using namespace hoi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Tracklet random_track(std::mt19937_64& g, int frames) {
  std::normal_distribution<double> n(0.0, 2.0);
  Tracklet t;
  Vec2 p(n(g) * 50, n(g) * 50);
  for (int f = 0; f < frames; ++f) {
    t.points.push_back(p);
    t.visible.push_back(true);
    // Keep every step well above the static threshold.
    Vec2 step(n(g), n(g));
    if (step.norm() < 0.1) step += Vec2(0.5, 0.0);
    p += step;
  }
  return t;
}

std::vector<oracle::V2> pts(const Tracklet& t) { return {t.points.begin(), t.points.end()}; }

Outcome mf_self_identity() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(101);
  double worst = 0.0;
  for (int s = 0; s < 50; ++s) {
    const int n = 5 + static_cast<int>(g() % 96);
    std::vector<Tracklet> set;
    for (int i = 0; i < n; ++i) set.push_back(random_track(g, 49));
    worst = std::max(worst, std::abs(motion_fidelity(set, set) - 2.0));
  }
  const Tracklet one = random_track(g, 49);
  Tracklet rev = one;
  for (std::size_t k = 1; k < rev.points.size(); ++k) rev.points[k] = 2 * one.points[0] - one.points[k];
  const double r = motion_fidelity(std::vector<Tracklet>{one}, std::vector<Tracklet>{rev});
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "max |MF(S,S)-2| = " << worst << ", reversed = " << r << ", " << fmt("%.2f s", secs);
  return {worst <= 1e-9 && std::abs(r + 2.0) <= 1e-9 && secs < 5.0, d.str()};
}

Outcome mf_oracle() {
  std::mt19937_64 g(202);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + i % 10, m = 1 + (i / 10) % 10;  // every (n, m) pair twice
    std::vector<Tracklet> gt, gen;
    std::vector<std::vector<oracle::V2>> ogt, ogen;
    const int frames = 2 + static_cast<int>(g() % 20);
    for (int k = 0; k < n; ++k) {
      gt.push_back(random_track(g, frames));
      ogt.push_back(pts(gt.back()));
    }
    for (int k = 0; k < m; ++k) {
      gen.push_back(random_track(g, frames));
      ogen.push_back(pts(gen.back()));
    }
    worst = std::max(worst, std::abs(motion_fidelity(gt, gen) - oracle::motion_fidelity(ogt, ogen, 1e-6)));
  }
  return {worst <= 1e-12, "max |MF - oracle| = " + fmt("%.3g", worst) + " over 200 instances"};
}

Outcome procrustes_invariance() {
  std::mt19937_64 g(303);
  std::uniform_real_distribution<double> u(-100, 100), sc(0.5, 2.0);
  double worst_pa = 0.0, worst_rt = 0.0;
  for (int i = 0; i < 100; ++i) {
    JointSet gt{{}, JointRole::GroundTruth}, pred{{}, JointRole::Predicted}, rigid{{}, JointRole::Predicted};
    const Mat3 r = oracle::random_rotation(g);
    const Vec3 t(u(g), u(g), u(g));
    const double s = sc(g);
    for (int k = 0; k < 21; ++k) {
      gt.points.emplace_back(u(g), u(g), u(g));
      pred.points.push_back(s * (r * gt.points.back()) + t);
      rigid.points.push_back(r * gt.points.back() + t);
    }
    worst_pa = std::max(worst_pa, pa_mpjpe(pred, gt));
    const auto fit = procrustes_align(gt.points, rigid.points, false);
    worst_rt = std::max({worst_rt, (fit.rotation - r).cwiseAbs().maxCoeff(), (fit.translation - t).cwiseAbs().maxCoeff()});
  }
  std::ostringstream d;
  d << "max PA-MPJPE = " << worst_pa << " mm, max rigid (R, t) error = " << worst_rt;
  return {worst_pa <= 1e-6 && worst_rt <= 1e-9, d.str()};
}

Outcome mpjpe_cases() {
  std::mt19937_64 g(404);
  std::uniform_real_distribution<double> u(-100, 100);
  JointSet gt{{}, JointRole::GroundTruth};
  for (int k = 0; k < 21; ++k) gt.points.emplace_back(u(g), u(g), u(g));
  JointSet moved{gt.points, JointRole::Predicted};
  for (auto& p : moved.points) p += Vec3(7, -3, 2);
  const double shifted = mpjpe_root_aligned(moved, gt);
  JointSet off{gt.points, JointRole::Predicted};
  off.points[11] += Vec3(3, 0, 4);
  const double one = mpjpe_root_aligned(off, gt);
  std::ostringstream d;
  d << "translated = " << shifted << " mm, 5 mm offset = " << fmt("%.15f", one) << " mm";
  return {shifted <= 1e-12 && std::abs(one - 5.0 / 21.0) <= 1e-12, d.str()};
}

Outcome rasterizer_oracle() {
  const auto t0 = Clock::now();
  Camera cam;
  cam.fx = cam.fy = 100.0;
  cam.cx = cam.cy = 32.0;
  cam.width = cam.height = 64;
  std::mt19937_64 g(505);
  std::uniform_real_distribution<double> u(-0.6, 0.6), z(0.5, 4.0);
  long checked = 0, depth_bad = 0, seg_bad = 0;
  for (int s = 0; s < 200; ++s) {
    const int count = 1 + s % 2;
    std::vector<TriMesh> meshes;
    std::vector<oracle::Tri> tris;
    std::vector<int> ids;
    for (int t = 0; t < count; ++t) {
      TriMesh m;
      for (int k = 0; k < 3; ++k) {
        const double d = z(g);
        m.vertices.emplace_back(u(g) * d, u(g) * d, d);
      }
      m.faces = {Face{0, 1, 2}};
      m.instance_id = 1 + t;
      tris.push_back({m.vertices[0], m.vertices[1], m.vertices[2]});
      ids.push_back(m.instance_id);
      meshes.push_back(m);
    }
    const auto r = rasterize(meshes, cam);
    std::vector<std::array<oracle::V2, 2>> edges;
    for (const auto& t : tris) {
      const std::array<Vec3, 3> v{t.a, t.b, t.c};
      for (int e = 0; e < 3; ++e) {
        const auto p = oracle::project(cam.fx, cam.fy, cam.cx, cam.cy, Mat3::Identity(), Vec3::Zero(), v[e]);
        const auto q = oracle::project(cam.fx, cam.fy, cam.cx, cam.cy, Mat3::Identity(), Vec3::Zero(), v[(e + 1) % 3]);
        edges.push_back({p.head<2>(), q.head<2>()});
      }
    }
    for (int row = 0; row < 64; ++row) {
      for (int col = 0; col < 64; ++col) {
        const oracle::V2 c(col + 0.5, row + 0.5);
        bool near = false;
        for (const auto& e : edges) near |= oracle::point_segment_2d(c, e[0], e[1]) <= 0.5;
        if (near) continue;
        ++checked;
        const auto hit = oracle::cast_pixel(tris, ids, cam.fx, cam.fy, cam.cx, cam.cy, row, col);
        const double want_depth = hit ? hit->depth : 0.0;
        const int want_id = hit ? hit->instance : 0;
        depth_bad += std::abs(r.depth.at(row, col) - want_depth) > 1e-4;
        seg_bad += r.seg.at(row, col) != want_id;
      }
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << checked << " pixels, depth mismatches " << depth_bad << ", label mismatches " << seg_bad << ", "
    << fmt("%.2f s", secs);
  return {depth_bad == 0 && seg_bad == 0 && secs < 30.0, d.str()};
}

Outcome zero_injection() {
  std::mt19937_64 g(606);
  std::normal_distribution<float> n(0.0f, 10.0f);
  float worst = 0.0f;
  for (int s = 0; s < 100; ++s) {
    auto dim = [&](int lo, int hi) { return lo + static_cast<int>(g() % (hi - lo + 1)); };
    const int f = dim(1, 4), h = dim(1, 6), w = dim(1, 6), cc = dim(1, 48), hc = dim(1, 32), bc = dim(1, 32);
    const int layers = dim(1, 12);
    InjectionOperator op(layers, cc, hc, bc, g());
    LatentTensor control(f, h, w, cc);
    for (auto& v : control.data) v = n(g);
    std::vector<FeatureMap> base;
    for (int l = 0; l < layers; ++l) {
      FeatureMap fm(f, h, w, bc);
      for (auto& v : fm.data) v = n(g);
      base.push_back(fm);
    }
    const auto out = op.inject(base, control);
    for (int l = 0; l < layers; ++l)
      for (std::size_t i = 0; i < base[l].data.size(); ++i)
        worst = std::max(worst, std::abs(out[l].data[i] - base[l].data[i]));
  }
  return {worst == 0.0f, "max abs diff over 100 shapes = " + fmt("%g", worst)};
}

Outcome latent_shapes() {
  CueSet cues;
  for (int f = 0; f < 49; ++f) {
    cues.depth.emplace_back(720, 480);
    cues.seg.emplace_back(720, 480);
    cues.keypoint.emplace_back(720, 480, 3);
  }
  const auto d = encode_cue(cues, CueKind::Depth, 1);
  const auto s = encode_cue(cues, CueKind::Seg, 2);
  const auto k = encode_cue(cues, CueKind::Keypoint, 3);
  const auto cat = concat_channels(d, s, k);
  const bool shapes = d.shape() == std::vector<int>{13, 60, 90, 16} && s.shape() == d.shape() &&
                      k.shape() == d.shape() && cat.shape() == std::vector<int>{13, 60, 90, 48};
  auto rejects = [](int w, int h) {
    CueSet c;
    for (int f = 0; f < 5; ++f) c.depth.emplace_back(w, h);
    try {
      encode_cue(c, CueKind::Depth, 1);
    } catch (const Error& e) {
      return e.code() == ErrorCode::Shape;
    }
    return false;
  };
  const bool rejected = rejects(722, 480) && rejects(720, 484);
  std::ostringstream o;
  o << "per-cue (" << d.frames << ", " << d.height << ", " << d.width << ", " << d.channels << "), concat channels "
    << cat.channels << ", non-divisible rejected: " << (rejected ? "yes" : "no");
  return {shapes && rejected, o.str()};
}

Outcome masking_frequency() {
  std::array<int, 3> drops{};
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) {
    const auto d = draw_cue_mask(0.2, static_cast<std::uint64_t>(s));
    for (int k = 0; k < 3; ++k) drops[k] += d[k];
  }
  bool ok = true;
  std::ostringstream o;
  o << "drop rates";
  for (int k = 0; k < 3; ++k) {
    const double rate = drops[k] / double(trials);
    ok &= rate >= 0.19 && rate <= 0.21;
    o << " " << cue_name(kAllCues[k]) << "=" << rate;
  }
  return {ok, o.str()};
}

Outcome frechet_checks() {
  const FeatureStats a{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1)};
  const FeatureStats b{Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1)};
  const double one = frechet_distance(a, b);
  std::mt19937_64 g(909);
  std::normal_distribution<double> n;
  double asym = 0.0, lowest = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int dim = 1 + i % 8;
    Eigen::MatrixXd ra(dim, dim), rb(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        ra(r, c) = n(g);
        rb(r, c) = n(g);
      }
    Eigen::VectorXd ma(dim), mb(dim);
    for (int r = 0; r < dim; ++r) {
      ma(r) = n(g);
      mb(r) = n(g);
    }
    const FeatureStats p{ma, ra * ra.transpose()}, q{mb, rb * rb.transpose()};
    const double pq = frechet_distance(p, q), qp = frechet_distance(q, p);
    asym = std::max(asym, std::abs(pq - qp));
    lowest = std::min({lowest, pq, qp});
  }
  std::ostringstream o;
  o << "1-D case = " << fmt("%.15f", one) << ", max asymmetry = " << asym << ", min value = " << lowest;
  return {std::abs(one - 1.0) <= 1e-12 && asym <= 1e-9 && lowest >= 0.0, o.str()};
}

double rotation_gap(const Vec3& a, const Vec3& b) {
  return (axis_angle_to_matrix(a) - axis_angle_to_matrix(b)).norm();
}

Outcome trajectory_endpoints() {
  std::mt19937_64 g(1010);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  auto random_pose = [&] {
    HandPose p;
    p.translation = Vec3(u(g), u(g), u(g)) * 0.1;
    for (auto& r : p.rotations) r = Vec3(u(g), u(g), u(g));
    return p;
  };
  const KinematicHand hand = make_default_hand();
  bool exact = true;
  for (int i = 0; i < 20; ++i) {
    const HandPose h0 = random_pose(), hT = random_pose();
    const ObjectPose o0{Vec3(u(g), u(g), u(g)), Vec3(u(g), u(g), u(g))};
    const ObjectPose oT{Vec3(u(g), u(g), u(g)), Vec3(u(g), u(g), u(g))};
    TrajectoryConfig cfg;
    cfg.frame_count = 49;
    const auto seq = interpolate_sequence(h0, hT, o0, oT, cfg, hand.wrist());
    exact &= seq.frames.front().hand == h0 && seq.frames.front().object == o0 && seq.frames.back().hand == hT &&
             seq.frames.back().object == oT;
  }

  HandPose a, b;
  b.rotations[5] = Vec3(0, 0, M_PI / 2);
  TrajectoryConfig lin;
  lin.frame_count = 49;
  lin.easing = Easing::Linear;
  const auto mid = interpolate_sequence(a, b, ObjectPose{}, ObjectPose{}, lin).frames[24].hand.rotations[5];
  const double mid_err = std::abs(mid.norm() - M_PI / 4) + mid.head<2>().norm();

  double rev = 0.0;
  for (Easing e : {Easing::Linear, Easing::Smoothstep}) {
    TrajectoryConfig cfg;
    cfg.frame_count = 49;
    cfg.easing = e;
    cfg.contact_fraction = 0.0;
    const HandPose h0 = random_pose(), hT = random_pose();
    const ObjectPose o0{Vec3(0.2, 0.1, 0.0), Vec3(0.1, 0.2, 0.3)};
    const ObjectPose oT{Vec3(-0.1, 0.4, 0.2), Vec3(0.3, 0.0, 0.5)};
    const auto fwd = interpolate_sequence(h0, hT, o0, oT, cfg);
    const auto bwd = interpolate_sequence(hT, h0, oT, o0, cfg);
    for (int i = 0; i < 49; ++i) {
      const auto& x = fwd.frames[i];
      const auto& y = bwd.frames[48 - i];
      rev = std::max(rev, (x.hand.translation - y.hand.translation).norm());
      for (int j = 0; j < kArticulatedCount; ++j) rev = std::max(rev, rotation_gap(x.hand.rotations[j], y.hand.rotations[j]));
      rev = std::max({rev, (x.object.translation - y.object.translation).norm(),
                      rotation_gap(x.object.rotation, y.object.rotation)});
    }
  }
  std::ostringstream o;
  o << "endpoints exact: " << (exact ? "yes" : "no") << ", midpoint error = " << mid_err
    << " rad, reversal error = " << rev;
  return {exact && mid_err <= 1e-12 && rev <= 1e-9, o.str()};
}

Outcome filtering() {
  std::vector<Candidate> c;
  std::mt19937_64 g(1111);
  std::vector<double> errs;
  for (int i = 0; i < 30; ++i) errs.push_back(5.0 + 0.73 * i);
  std::shuffle(errs.begin(), errs.end(), g);
  for (int i = 0; i < 30; ++i) c.push_back({"clip" + std::to_string(i), errs[i]});
  const auto kept = rank_and_filter(c, 0.25);
  std::vector<double> sorted = errs;
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[22];
  bool right = kept.size() == 23;
  for (const auto& cand : c) {
    const bool is_kept = std::find(kept.begin(), kept.end(), cand.id) != kept.end();
    right &= is_kept == (cand.pose_error_mm <= cut);
  }
  return {right, std::to_string(kept.size()) + " of 30 kept, discarded set = 7 largest: " + (right ? "yes" : "no")};
}

// Bytes of every file under conditions/ and latents/, keyed by relative path.
std::map<std::string, std::string> artifact_bytes(const std::string& out) {
  std::map<std::string, std::string> files;
  for (const char* sub : {"conditions", "latents"}) {
    for (const auto& e : fs::recursive_directory_iterator(out + "/" + sub)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), out).string()] = fixture::read_text(e.path().string());
    }
  }
  return files;
}

struct PipelineRun {
  std::string out;
  double seconds = 0.0;
};

PipelineRun run_toy(const PipelineConfig& cfg, const std::string& out, int jobs) {
  const auto t0 = Clock::now();
  run_pipeline(cfg, PipelineInputs{fixture::toy("endpoints.json"), out, "", ""}, jobs);
  return {out, seconds_since(t0)};
}

Outcome determinism(const std::string& root) {
  const auto cfg = load_config(fixture::toy("config.ini"));
  const auto a = run_toy(cfg, root + "/run_a", 1);
  const auto b = run_toy(cfg, root + "/run_b", 1);
  const auto c = run_toy(cfg, root + "/run_c", 4);
  const auto fa = artifact_bytes(a.out), fb = artifact_bytes(b.out), fc = artifact_bytes(c.out);
  std::ostringstream o;
  o << fa.size() << " files, run/run identical: " << (fa == fb ? "yes" : "no")
    << ", jobs 1/4 identical: " << (fa == fc ? "yes" : "no") << ", single-threaded " << fmt("%.2f s", a.seconds);
  return {!fa.empty() && fa == fb && fa == fc && a.seconds < 60.0, o.str()};
}

// Ground truth from the first toy run: rendered keypoint frames, render
// tracklets and skeleton joints from the pose sequence, each evaluated
// against itself.
Outcome self_evaluation(const std::string& root) {
  const std::string run = root + "/run_a";
  const auto cfg = load_config(fixture::toy("config.ini"));
  const auto seq = load_sequence(run + "/poses/sequence.json");
  const KinematicHand hand = load_configured_hand(cfg);
  std::vector<std::vector<Vec3>> joints;
  for (const auto& f : seq.frames) {
    const auto j = forward_kinematics(hand, f.hand);
    std::vector<Vec3> mm;
    for (const auto& p : j) mm.push_back(p * 1000.0);
    joints.push_back(mm);
  }
  fixture::write_points(joints, root + "/joints_mm.json");
  const nlohmann::json line = {{"id", "toy"},
                               {"reference_frames", run + "/conditions/keypoints"},
                               {"generated_frames", run + "/conditions/keypoints"},
                               {"gt_tracklets", run + "/conditions/tracklets.json"},
                               {"gen_tracklets", run + "/conditions/tracklets.json"},
                               {"gt_joints", root + "/joints_mm.json"},
                               {"pred_joints", root + "/joints_mm.json"}};
  const auto report = run_eval(cfg, fixture::write_manifest(root, {line}), root + "/self_report.json", "");
  const bool ok = report.psnr && *report.psnr == kPsnrCapDb && report.ssim && *report.ssim == 1.0 && report.mf &&
                  *report.mf == 2.0 && report.mpjpe_mm && *report.mpjpe_mm == 0.0;
  std::ostringstream o;
  o << "PSNR = " << report.psnr.value_or(-1) << " dB, SSIM = " << report.ssim.value_or(-1)
    << ", MF = " << report.mf.value_or(-9) << ", MPJPE = " << report.mpjpe_mm.value_or(-1) << " mm over "
    << report.frames << " frames and " << report.tracks << " tracks";
  return {ok, o.str()};
}

}  // namespace

int main() {
  const std::string root = fixture::fresh_dir("acceptance");
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"mf-self-identity", mf_self_identity},
      {"mf-oracle-equivalence", mf_oracle},
      {"procrustes-invariance", procrustes_invariance},
      {"mpjpe-analytic", mpjpe_cases},
      {"rasterizer-oracle", rasterizer_oracle},
      {"zero-injection-identity", zero_injection},
      {"latent-shape-contract", latent_shapes},
      {"masking-frequency", masking_frequency},
      {"frechet-distance", frechet_checks},
      {"trajectory-endpoints", trajectory_endpoints},
      {"filtering-protocol", filtering},
      {"pipeline-determinism", [&] { return determinism(root); }},
      {"self-evaluation", [&] { return self_evaluation(root); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

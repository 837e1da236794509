// Copyright 2026 The Brushwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Acceptance harness: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "brushwork/compositor.hpp"
#include "brushwork/document.hpp"
#include "brushwork/image_io.hpp"
#include "brushwork/losses.hpp"
#include "brushwork/painter.hpp"
#include "brushwork/parallel.hpp"
#include "brushwork/surrogate.hpp"
#include "demo.hpp"
#include "test_support.hpp"

using namespace brushwork;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a sub-check; the criterion passes only if all of them do.
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = (i + j) / 2.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const Eigen::Map<const Eigen::VectorXd> x(ra.data(), ra.size()), y(rb.data(), rb.size());
  const Eigen::VectorXd xc = x.array() - x.mean(), yc = y.array() - y.mean();
  return xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm());
}

// ------------------------------------------------------------------ 1

void zero_gradient(Outcome& o) {
  const auto t0 = Clock::now();
  ZeroGradConfig cfg;
  for (double d = 40; d <= 100; d += 5) cfg.distances_px.push_back(d);
  const auto rows = zero_gradient_sweep(cfg);
  const double secs = seconds_since(t0);

  double lo = rows[0].l1, hi = rows[0].l1, max_fd = 0;
  std::vector<double> dist, ot;
  bool increasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lo = std::min(lo, rows[i].l1);
    hi = std::max(hi, rows[i].l1);
    max_fd = std::max(max_fd, rows[i].l1_fd_grad);
    dist.push_back(rows[i].distance_px);
    ot.push_back(rows[i].ot);
    if (i > 0 && !(rows[i].ot > rows[i - 1].ot)) increasing = false;
  }
  const double rho = spearman(dist, ot);
  o.detail << "l1 spread " << hi - lo << ", max |fd grad l1| " << max_fd << ", OT " << ot.front()
           << " -> " << ot.back() << ", spearman " << rho << ", " << secs << " s";
  o.require(hi - lo < 1e-9, "l1 spread < 1e-9");
  o.require(max_fd < 1e-8, "l1 fd gradient < 1e-8");
  o.require(increasing, "OT strictly increasing");
  o.require(rho == 1.0, "spearman 1.0");
  o.require(secs < 10, "runtime < 10 s");
}

// ------------------------------------------------------------------ 2

void convergence(Outcome& o) {
  const auto t0 = Clock::now();
  ConvergenceConfig with_ot;
  ConvergenceConfig l1_only = with_ot;
  l1_only.weights.beta_ot = 0;
  const double a = single_stroke_convergence(with_ot).final_iou;
  const double b = single_stroke_convergence(l1_only).final_iou;
  const double secs = seconds_since(t0);
  o.detail << "IoU with OT " << a << ", l1 only " << b << ", " << secs << " s";
  o.require(a > 0.8, "IoU with OT > 0.8");
  o.require(b < 0.1, "IoU l1 only < 0.1");
  o.require(secs < 60, "runtime < 60 s");
}

// ------------------------------------------------------------------ 3

void gradients(Outcome& o) {
  const auto t0 = Clock::now();
  const double step = 1e-5;  // normalized parameter units
  for (BrushType b : testing::kAllBrushes) {
    double raster = 0, sequence = 0;
    int checked = 0;
    for (int s = 0; s < 20; ++s) {
      const auto r = testing::check_rasterize_gradient(testing::random_stroke(b, 7000 + s, 64), 64, {},
                                                       8000 + s, step);
      raster = std::max(raster, r.worst);
      checked += r.checked;
      std::vector<StrokeParams> chain;
      for (int k = 0; k < 3; ++k) chain.push_back(testing::random_stroke(b, 9000 + 10 * s + k, 48));
      const auto q = testing::check_sequence_gradient(chain, 48, {}, 9500 + s, step);
      sequence = std::max(sequence, q.worst);
      checked += q.checked;
    }
    o.detail << brush_tag(b) << " raster " << raster << " seq " << sequence << "; ";
    o.require(raster < 1e-3, std::string(brush_tag(b)) + " rasterizer < 1e-3");
    o.require(sequence < 1e-3, std::string(brush_tag(b)) + " sequence < 1e-3");
    o.require(checked > 0, "components checked");
  }

  double ot = 0;
  int ot_checked = 0;
  for (int s = 0; s < 20; ++s) {
    const Canvas ref = testing::smooth_canvas(24, 24, 100 + s, 0.05, 0.95);
    const Canvas img = testing::smooth_canvas(24, 24, 200 + s, 0.05, 0.95);
    const auto r = testing::check_ot_gradient(img, ref, {}, 40, 300 + s);
    ot = std::max(ot, r.worst);
    ot_checked += r.checked;
  }
  o.detail << "sinkhorn " << ot << " (" << ot_checked << " comps); ";
  o.require(ot < 1e-2 && ot_checked > 0, "sinkhorn < 1e-2");

  double net = 0;
  for (BrushType b : testing::kAllBrushes)
    for (auto v : {SurrogateVariant::kRasterOnly, SurrogateVariant::kShadingOnly, SurrogateVariant::kDual}) {
      const auto r = testing::check_surrogate_gradient(v, b, 40);
      net = std::max(net, r.worst);
      o.require(r.checked > 0, "surrogate components checked");
    }
  o.detail << "surrogate " << net << "; " << seconds_since(t0) << " s";
  o.require(net < 1e-3, "surrogate < 1e-3");
}

// ------------------------------------------------------------------ 4

void oracle(Outcome& o) {
  Rng rng(2024);
  int sharp_ok = 0, loose_ok = 0;
  double sharp_worst = 0, loose_worst = 0;
  const int pairs = 50;
  for (int k = 0; k < pairs; ++k) {
    const int m = 2 + static_cast<int>(rng.next() % 15), n = 2 + static_cast<int>(rng.next() % 15);
    Eigen::VectorXd p(m), q(n);
    for (int i = 0; i < m; ++i) p[i] = rng.uniform(0.05, 1);
    for (int j = 0; j < n; ++j) q[j] = rng.uniform(0.05, 1);
    p /= p.sum();
    q /= q.sum();
    Eigen::MatrixXd a(m, 2), b(n, 2), d(m, n);
    for (int i = 0; i < m; ++i) a.row(i) << rng.uniform(), rng.uniform();
    for (int j = 0; j < n; ++j) b.row(j) << rng.uniform(), rng.uniform();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = (a.row(i) - b.row(j)).norm();
    const double exact = exact_ot_oracle(p, q, d);
    const double sharp = sinkhorn_plan(p, q, d, {48, 0.001, 200, 1e-6}).loss;
    const double loose = sinkhorn_plan(p, q, d, {48, 0.01, 5, 1e-6}).loss;
    const double es = std::abs(sharp - exact) / exact, el = std::abs(loose - exact) / exact;
    sharp_worst = std::max(sharp_worst, es);
    loose_worst = std::max(loose_worst, el);
    sharp_ok += es <= 0.01;
    loose_ok += el <= 0.15;
  }
  o.detail << "eps 0.001/200 iters: " << sharp_ok << "/" << pairs << " within 1% (worst " << sharp_worst
           << "); eps 0.01/5 iters: " << loose_ok << "/" << pairs << " within 15% (worst " << loose_worst << ")";
  o.require(sharp_ok == pairs, "all within 1% at eps 0.001, 200 iters");
  o.require(loose_ok == pairs, "all within 15% at eps 0.01, 5 iters");
}

// ------------------------------------------------------------------ 5

void soft_hard(Outcome& o) {
  const std::array<double, 3> kappas{10, 50, 250};
  for (BrushType b : testing::kAllBrushes) {
    std::array<double, 3> err{};
    const int count = 20;
    for (int s = 0; s < count; ++s) {
      const StrokeParams p = sample_random_stroke(b, 11000 + s);
      for (int i = 0; i < 3; ++i) {
        SoftnessConfig cfg;
        cfg.sharpness = kappas[i];
        err[i] += mean_abs_diff(soft_rasterize(p, 128, cfg).alpha, hard_rasterize(p, 128, cfg).alpha) / count;
      }
    }
    o.detail << brush_tag(b) << " " << err[0] << " > " << err[1] << " > " << err[2] << "; ";
    o.require(err[0] > err[1] && err[1] > err[2], std::string(brush_tag(b)) + " decreasing");
    if (!is_curve_brush(b)) o.require(err[2] < 0.02, std::string(brush_tag(b)) + " < 0.02 at 250");
  }
}

// ------------------------------------------------------------------ 6

void painting(Outcome& o) {
  set_thread_count(1);
  const Canvas ref = prepare_reference(read_png(testing::data_path("astronaut_128.png")), 128, false);
  PaintConfig cfg;
  const auto t0 = Clock::now();
  const PaintResult r = paint(ref, cfg);
  const double secs = seconds_since(t0);

  const double initial = l1_loss(Canvas(128, 128, 1.0), ref).value;
  const double final_l1 = l1_loss(r.canvas, ref).value;

  // Best-so-far, recomputed from the per-block results.
  double running = std::numeric_limits<double>::infinity(), previous = running;
  bool monotone = true;
  int regressions = 0;
  for (std::size_t i = 0; i < r.blocks.size(); ++i) {
    running = std::min(running, r.blocks[i].best.total);
    monotone = monotone && r.blocks[i].best_so_far == running && running <= previous;
    previous = running;
    if (i > 0 && r.blocks[i].best.total > r.blocks[i - 1].best.total) ++regressions;
  }

  const PaintingDocument back = import_document(export_document(r.document));
  const bool round_trip =
      back == r.document && render_document(back, 128, RenderMode::kSoft) == render_document(r.document, 128, RenderMode::kSoft);
  const Canvas low = render_document(r.document, 128, RenderMode::kSoft);
  const double hires = mean_abs_diff(area_resize(render_document(r.document, 1024, RenderMode::kSoft), 128, 128), low);

  o.detail << "l1 " << initial << " -> " << final_l1 << " (ratio " << final_l1 / initial << "), strokes "
           << r.document.strokes.size() << ", post-block loss regressions " << regressions << "/"
           << r.blocks.size() - 1 << ", 1024->128 diff " << hires << ", " << secs << " s";
  o.require(final_l1 <= 0.4 * initial, "final l1 <= 40% of initial");
  o.require(monotone, "best-so-far nonincreasing");
  o.require(round_trip, "lossless round trip");
  o.require(hires < 0.03, "1024 re-render diff < 0.03");
  o.require(r.document.strokes.size() == 300, "300 strokes");
  o.require(secs < 900, "runtime < 15 min");
}

// ------------------------------------------------------------------ 7

void ablation(Outcome& o) {
  double slowest = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.strokes_per_epoch = 6400;
    cfg.seed = seed;
    const auto held_out = validation_strokes(cfg.brush, cfg.validation_strokes);
    std::array<double, 3> score{};
    int i = 0;
    for (auto v : {SurrogateVariant::kRasterOnly, SurrogateVariant::kShadingOnly, SurrogateVariant::kDual}) {
      const auto t0 = Clock::now();
      const TrainResult r = train_surrogate(v, cfg);
      slowest = std::max(slowest, seconds_since(t0));
      score[i++] = evaluate_surrogate(r.model, held_out).mean_psnr;
    }
    o.detail << "seed " << seed << ": raster " << score[0] << ", shading " << score[1] << ", dual " << score[2]
             << "; ";
    o.require(score[2] >= score[1] && score[1] >= score[0], "Dual >= Shading >= Raster, seed " + std::to_string(seed));
    o.require(std::all_of(score.begin(), score.end(), [](double s) { return std::isfinite(s) && s > 10; }),
              "PSNR finite and > 10 dB");
  }
  o.detail << "slowest variant " << slowest << " s";
  o.require(slowest < 600, "training < 10 min per variant");
}

// ------------------------------------------------------------------ 8

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void determinism(Outcome& o) {
  const fs::path root = fs::temp_directory_path() / "brushwork_acceptance_determinism";
  fs::remove_all(root);
  const std::string tool = BRUSHWORK_TOOL_PATH;
  const std::string photo = testing::data_path("astronaut_160x120.png");

  struct Command {
    std::string name, args;
    std::vector<std::string> outputs;  // relative to the run directory
  };
  const std::vector<Command> commands{
      {"paint",
       "paint " + photo + " --strokes 12 --scales 1,2 --resolution 64 --frames --quiet --seed 5 --out p",
       {"p.paint.json", "p.png", "p.loss.csv", "p_frames/frame_0001.png", "p_frames/frame_0012.png"}},
      {"render", "render p.paint.json --resolution 256 --out r.png", {"r.png"}},
      {"demo-zero-grad", "demo-zero-grad --steps 60 --out z", {"z_sweep.csv", "z_convergence.csv"}},
      {"train-surrogate", "train-surrogate --variant dual --epochs 2 --strokes-per-epoch 256 --seed 9 --out s",
       {"s.ckpt", "s_psnr.csv"}},
      {"ablate-surrogate", "ablate-surrogate --epochs 1 --strokes-per-epoch 256 --seed 9 --out a", {"a.csv"}},
  };

  const std::vector<std::pair<std::string, std::string>> runs{
      {"one_a", "--threads 1"}, {"one_b", "--threads 1"}, {"four", "--threads 4"}};
  for (const auto& [dir, threads] : runs) {
    fs::create_directories(root / dir);
    for (const Command& c : commands) {
      const std::string line = "cd '" + (root / dir).string() + "' && '" + tool + "' " + c.args + " " + threads +
                               " > /dev/null 2>&1";
      o.require(std::system(line.c_str()) == 0, c.name + " exits 0 (" + dir + ")");
    }
  }
  int compared = 0;
  for (const Command& c : commands) {
    bool same = true;
    for (const std::string& f : c.outputs) {
      const std::string ref = slurp(root / "one_a" / f);
      same = same && !ref.empty() && ref == slurp(root / "one_b" / f) && ref == slurp(root / "four" / f);
      ++compared;
    }
    o.detail << c.name << (same ? " identical" : " DIFFERS") << "; ";
    o.require(same, c.name + " byte-identical");
  }
  o.detail << compared << " artifacts x 3 runs";
  fs::remove_all(root);
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "zero-gradient reproduction", zero_gradient},
      {2, "single stroke convergence", convergence},
      {3, "gradient correctness", gradients},
      {4, "OT oracle equivalence", oracle},
      {5, "soft/hard consistency", soft_hard},
      {6, "end-to-end painting", painting},
      {7, "surrogate ablation", ablation},
      {8, "determinism", determinism},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

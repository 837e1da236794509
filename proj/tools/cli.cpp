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


#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "brushwork/compositor.hpp"
#include "brushwork/document.hpp"
#include "brushwork/image_io.hpp"
#include "brushwork/painter.hpp"
#include "brushwork/parallel.hpp"
#include "brushwork/surrogate.hpp"
#include "demo.hpp"

namespace brushwork {
namespace {

// Failure with a specific exit code.
struct CliError : std::runtime_error {
  CliError(ExitCode c, const std::string& what) : std::runtime_error(what), code(c) {}
  ExitCode code;
};

// Collects written files so a failed command can remove its partial output.
class OutputSet {
 public:
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = written_.rbegin(); it != written_.rend(); ++it) std::filesystem::remove(*it, ec);
  }

  void track(const std::string& path) { written_.push_back(path); }
  void commit() { committed_ = true; }

 private:
  std::vector<std::string> written_;
  bool committed_ = false;
};

std::ofstream open_output(const std::string& path, OutputSet& outputs) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError(kExitOutput, "cannot open '" + path + "' for writing");
  outputs.track(path);
  f << std::setprecision(17);
  return f;
}

void close_output(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw CliError(kExitOutput, "failed writing '" + path + "'");
}

void png_output(const Canvas& image, const std::string& path, OutputSet& outputs) {
  try {
    write_png(image, path);
  } catch (const ImageIoError& e) {
    throw CliError(kExitOutput, e.what());
  }
  outputs.track(path);
}

void make_directory(const std::string& path, OutputSet& outputs) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) return;
  if (!std::filesystem::create_directories(path, ec))
    throw CliError(kExitOutput, "cannot create directory '" + path + "'");
  outputs.track(path);
}

BrushType parse_brush(const std::string& tag) {
  const auto brush = brush_from_tag(tag);
  if (!brush) throw CliError(kExitUsage, "unknown brush '" + tag + "'");
  return *brush;
}

const std::vector<std::string> kBrushTags{"oil", "marker", "watercolor", "tape"};

struct SharedFlags {
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void add_shared(CLI::App* cmd, SharedFlags& flags, const std::string& default_out) {
  flags.out = default_out;
  cmd->add_option("--seed", flags.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", flags.threads, "Worker threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  cmd->add_option("--out", flags.out, "Output path or prefix")->capture_default_str();
}

// ---------------------------------------------------------------- paint

struct PaintFlags {
  SharedFlags shared;
  std::string input;
  std::string brush = "oil";
  PaintConfig config;
  bool frames = false;
  bool letterbox = false;
  bool quiet = false;
};

void add_loss_flags(CLI::App* cmd, LossWeights& w, SinkhornConfig& s) {
  cmd->add_option("--beta-l1", w.beta_l1, "Weight of the pixel loss")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--beta-ot", w.beta_ot, "Weight of the transport loss")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--ot-res", s.ot_resolution, "Side of the transport grid")
      ->check(CLI::Range(4, 256))
      ->capture_default_str();
  cmd->add_option("--epsilon", s.epsilon, "Entropic regularization weight")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--sinkhorn-iters", s.n_iter, "Scaling rounds")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
}

int cmd_paint(const PaintFlags& flags, std::ostream& out, std::ostream& err) {
  PaintConfig config = flags.config;
  config.brush = parse_brush(flags.brush);
  config.seed = flags.shared.seed;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kExitUsage, e.what());
  }

  Canvas image;
  try {
    image = read_png(flags.input);
  } catch (const ImageIoError& e) {
    throw CliError(kExitInput, e.what());
  }
  const Canvas reference = prepare_reference(image, config.working_resolution, flags.letterbox);

  const auto start = std::chrono::steady_clock::now();
  const PaintResult result = paint(reference, config, [&](const BlockTelemetry& b) {
    if (flags.quiet) return;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "scale " << b.scale << " block " << b.block << ": best l1 " << b.best.l1 << " ot "
        << b.best.ot << " total " << b.best.total << " (" << std::fixed << std::setprecision(1)
        << secs << "s)" << std::defaultfloat << std::setprecision(6) << "\n";
  });

  OutputSet outputs;
  const std::string& prefix = flags.shared.out;
  const std::string doc_path = prefix + ".paint.json";
  {
    auto f = open_output(doc_path, outputs);
    f << export_document(result.document);
    close_output(f, doc_path);
  }
  png_output(result.canvas, prefix + ".png", outputs);
  {
    const std::string path = prefix + ".loss.csv";
    auto f = open_output(path, outputs);
    f << "scale,block,step,l1,ot,total\n";
    for (const auto& b : result.blocks)
      for (std::size_t k = 0; k < b.trace.size(); ++k)
        f << b.scale << ',' << b.block << ',' << k << ',' << b.trace[k].l1 << ',' << b.trace[k].ot
          << ',' << b.trace[k].total << '\n';
    close_output(f, path);
  }
  if (flags.frames) {
    const std::string dir = prefix + "_frames";
    make_directory(dir, outputs);
    const int res = config.working_resolution;
    Canvas canvas = Canvas::filled(res, res, config.background);
    const auto strokes = result.document.stroke_params();
    for (std::size_t k = 0; k < strokes.size(); ++k) {
      canvas = blend(canvas, soft_rasterize(strokes[k], res, config.softness));
      char name[32];
      std::snprintf(name, sizeof(name), "/frame_%04zu.png", k + 1);
      png_output(canvas, dir + name, outputs);
    }
  }
  outputs.commit();
  out << "wrote " << doc_path << " (" << result.document.strokes.size() << " strokes)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- render

struct RenderFlags {
  std::string document;
  int resolution = 1024;
  bool hard = false;
  std::string out = "render.png";
  int threads = 1;
};

int cmd_render(const RenderFlags& flags, std::ostream& out) {
  if (flags.resolution < kMinResolution)
    throw CliError(kExitUsage, "--resolution must be at least " + std::to_string(kMinResolution));
  PaintingDocument doc;
  try {
    doc = load_document(flags.document);
  } catch (const DocumentError& e) {
    throw CliError(kExitDocument, e.what());
  } catch (const std::runtime_error& e) {
    throw CliError(kExitInput, e.what());
  }
  const Canvas image =
      render_document(doc, flags.resolution, flags.hard ? RenderMode::kHard : RenderMode::kSoft);
  OutputSet outputs;
  png_output(image, flags.out, outputs);
  outputs.commit();
  out << "wrote " << flags.out << " (" << flags.resolution << "x" << flags.resolution << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- demo-zero-grad

struct DemoFlags {
  SharedFlags shared;
  ConvergenceConfig convergence;
};

int cmd_demo_zero_grad(const DemoFlags& flags, std::ostream& out) {
  ZeroGradConfig sweep_cfg;
  sweep_cfg.sinkhorn = flags.convergence.sinkhorn;
  try {
    flags.convergence.sinkhorn.validate();
    flags.convergence.weights.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kExitUsage, e.what());
  }
  const auto sweep = zero_gradient_sweep(sweep_cfg);

  ConvergenceConfig with_ot = flags.convergence;
  ConvergenceConfig l1_only = flags.convergence;
  l1_only.weights.beta_ot = 0.0;
  const ConvergenceTrace a = single_stroke_convergence(with_ot);
  const ConvergenceTrace b = single_stroke_convergence(l1_only);

  OutputSet outputs;
  const std::string sweep_path = flags.shared.out + "_sweep.csv";
  {
    auto f = open_output(sweep_path, outputs);
    f << "distance_px,l1,l1_grad_norm,l1_fd_grad,ot\n";
    for (const auto& r : sweep)
      f << r.distance_px << ',' << r.l1 << ',' << r.l1_grad_norm << ',' << r.l1_fd_grad << ','
        << r.ot << '\n';
    close_output(f, sweep_path);
  }
  const std::string conv_path = flags.shared.out + "_convergence.csv";
  {
    auto f = open_output(conv_path, outputs);
    f << "step,iou_l1_ot,total_l1_ot,iou_l1_only,total_l1_only\n";
    for (std::size_t k = 0; k < a.iou.size(); ++k)
      f << k << ',' << a.iou[k] << ',' << a.loss[k].total << ',' << b.iou[k] << ','
        << b.loss[k].total << '\n';
    close_output(f, conv_path);
  }
  outputs.commit();
  out << "final IoU with transport loss " << a.final_iou << ", pixel loss only " << b.final_iou
      << "\nwrote " << sweep_path << " and " << conv_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- surrogate

struct SurrogateFlags {
  SharedFlags shared;
  std::string brush = "oil";
  std::string variant = "dual";
  TrainConfig config;
};

void add_train_flags(CLI::App* cmd, SurrogateFlags& flags) {
  TrainConfig& c = flags.config;
  cmd->add_option("--brush", flags.brush, "Brush type")
      ->check(CLI::IsMember(kBrushTags))
      ->capture_default_str();
  cmd->add_option("--epochs", c.epochs, "Training epochs")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  cmd->add_option("--strokes-per-epoch", c.strokes_per_epoch, "Random strokes per epoch")
      ->check(CLI::Range(1, 100000000))
      ->capture_default_str();
  cmd->add_option("--batch-size", c.batch_size, "Strokes per optimizer step")
      ->check(CLI::Range(1, 65536))
      ->capture_default_str();
  cmd->add_option("--lr", c.learning_rate, "Adam step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lr-decay", c.lr_decay, "Step size factor applied after each epoch")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

TrainConfig surrogate_config(const SurrogateFlags& flags) {
  TrainConfig c = flags.config;
  c.brush = parse_brush(flags.brush);
  c.seed = flags.shared.seed;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kExitUsage, e.what());
  }
  return c;
}

int cmd_train_surrogate(const SurrogateFlags& flags, std::ostream& out) {
  const TrainConfig cfg = surrogate_config(flags);
  const auto variant = variant_from_tag(flags.variant);
  if (!variant) throw CliError(kExitUsage, "unknown variant '" + flags.variant + "'");
  const TrainResult result = train_surrogate(*variant, cfg);

  OutputSet outputs;
  const std::string ckpt = flags.shared.out + ".ckpt";
  try {
    save_checkpoint(result.model, ckpt);
  } catch (const std::runtime_error& e) {
    throw CliError(kExitOutput, e.what());
  }
  outputs.track(ckpt);
  const std::string curve = flags.shared.out + "_psnr.csv";
  {
    auto f = open_output(curve, outputs);
    f << "epoch,validation_psnr\n";
    for (std::size_t e = 0; e < result.validation_psnr.size(); ++e)
      f << e + 1 << ',' << result.validation_psnr[e] << '\n';
    close_output(f, curve);
  }
  outputs.commit();
  out << "final validation PSNR " << result.validation_psnr.back() << " dB\nwrote " << ckpt
      << " and " << curve << "\n";
  return kExitOk;
}

const char* variant_label(SurrogateVariant v) {
  switch (v) {
    case SurrogateVariant::kRasterOnly: return "rasterization only";
    case SurrogateVariant::kShadingOnly: return "shading only";
    case SurrogateVariant::kDual: return "rasterization + shading";
  }
  return "";
}

int cmd_ablate_surrogate(const SurrogateFlags& flags, std::ostream& out) {
  const TrainConfig cfg = surrogate_config(flags);
  const auto rows = ablate_surrogate(cfg);
  OutputSet outputs;
  const std::string path = flags.shared.out + ".csv";
  auto f = open_output(path, outputs);
  f << "variant,label,foreground_psnr,alpha_psnr,mean_psnr\n";
  for (const auto& r : rows) {
    f << variant_tag(r.variant) << ',' << variant_label(r.variant) << ','
      << r.score.foreground_psnr << ',' << r.score.alpha_psnr << ',' << r.score.mean_psnr << '\n';
    out << variant_label(r.variant) << ": " << r.score.mean_psnr << " dB\n";
  }
  close_output(f, path);
  outputs.commit();
  out << "wrote " << path << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stroke-based painting by differentiable rendering and optimal transport", "brushwork"};
  app.require_subcommand(1);

  PaintFlags paint_flags;
  CLI::App* paint_cmd = app.add_subcommand("paint", "Paint an image with brush strokes");
  add_shared(paint_cmd, paint_flags.shared, "painting");
  paint_cmd->add_option("input", paint_flags.input, "Input PNG")->required();
  paint_cmd->add_option("--brush", paint_flags.brush, "Brush type")
      ->check(CLI::IsMember(kBrushTags))
      ->capture_default_str();
  PaintConfig& pc = paint_flags.config;
  paint_cmd->add_option("--strokes", pc.total_strokes, "Total stroke budget")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  paint_cmd->add_option("--scales", pc.scales, "Block grid sizes, e.g. 1,2,3,4")
      ->delimiter(',')
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  paint_cmd->add_option("--lr", pc.learning_rate, "RMSprop step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_loss_flags(paint_cmd, pc.weights, pc.sinkhorn);
  paint_cmd->add_option("--resolution", pc.working_resolution, "Working resolution")
      ->check(CLI::Range(kMinResolution, 4096))
      ->capture_default_str();
  paint_cmd->add_option("--steps-per-stroke", pc.steps_per_stroke, "Optimizer steps per stroke")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  paint_cmd->add_flag("--frames", paint_flags.frames, "Write one PNG per stroke");
  paint_cmd->add_flag("--letterbox", paint_flags.letterbox, "Pad instead of cropping to square");
  paint_cmd->add_flag("--quiet", paint_flags.quiet, "No progress lines");

  RenderFlags render_flags;
  CLI::App* render_cmd = app.add_subcommand("render", "Render a painting document");
  render_cmd->add_option("document", render_flags.document, "Input .paint.json")->required();
  render_cmd->add_option("--resolution", render_flags.resolution, "Output side in pixels")
      ->capture_default_str();
  render_cmd->add_flag("--hard", render_flags.hard, "Binary-edged rendering");
  render_cmd->add_option("--out", render_flags.out, "Output PNG")->capture_default_str();
  render_cmd->add_option("--threads", render_flags.threads, "Worker threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();

  DemoFlags demo_flags;
  CLI::App* demo_cmd = app.add_subcommand(
      "demo-zero-grad", "Pixel loss versus transport loss on disjoint strokes");
  add_shared(demo_cmd, demo_flags.shared, "zero_grad");
  ConvergenceConfig& cc = demo_flags.convergence;
  demo_cmd->add_option("--steps", cc.steps, "Optimizer steps per run")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  demo_cmd->add_option("--lr", cc.learning_rate, "RMSprop step size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_loss_flags(demo_cmd, cc.weights, cc.sinkhorn);

  SurrogateFlags train_flags;
  CLI::App* train_cmd = app.add_subcommand("train-surrogate", "Train a neural stroke renderer");
  add_shared(train_cmd, train_flags.shared, "surrogate");
  add_train_flags(train_cmd, train_flags);
  train_cmd->add_option("--variant", train_flags.variant, "Network variant")
      ->check(CLI::IsMember({"dual", "raster_only", "shading_only"}))
      ->capture_default_str();

  SurrogateFlags ablate_flags;
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate-surrogate", "Compare the three renderer variants");
  add_shared(ablate_cmd, ablate_flags.shared, "ablation");
  add_train_flags(ablate_cmd, ablate_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*paint_cmd) {
      set_thread_count(paint_flags.shared.threads);
      return cmd_paint(paint_flags, out, err);
    }
    if (*render_cmd) {
      set_thread_count(render_flags.threads);
      return cmd_render(render_flags, out);
    }
    if (*demo_cmd) {
      set_thread_count(demo_flags.shared.threads);
      return cmd_demo_zero_grad(demo_flags, out);
    }
    if (*train_cmd) {
      set_thread_count(train_flags.shared.threads);
      return cmd_train_surrogate(train_flags, out);
    }
    if (*ablate_cmd) {
      set_thread_count(ablate_flags.shared.threads);
      return cmd_ablate_surrogate(ablate_flags, out);
    }
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace brushwork

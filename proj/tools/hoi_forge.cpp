// hoi-forge: command-line front end over the hoiforge C API.

#include "hoiforge/hoiforge.h"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

namespace {

struct Common {
  std::string config;
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
  std::string hand;
  std::string object;
};

void add_common(CLI::App* sub, Common& c, bool assets) {
  sub->add_option("--config", c.config, "INI or JSON configuration")->required();
  sub->add_option("--jobs", c.jobs, "worker threads (outputs do not depend on it)")->check(CLI::PositiveNumber);
  sub->add_option("--seed-override", c.seed_override, "derive every seed from this integer");
  if (assets) {
    sub->add_option("--hand", c.hand, "hand model JSON (overrides assets.hand)");
    sub->add_option("--object", c.object, "object OBJ mesh (overrides assets.object)");
  }
}

int report(hf_status st) {
  if (st == HF_OK) {
    const char* out = hf_last_output();
    if (out && *out) std::printf("%s\n", out);
    return 0;
  }
  std::fprintf(stderr, "hoi-forge: %s: %s\n", hf_status_name(st), hf_last_error());
  return hf_exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hand-object interaction condition and evaluation toolkit"};
  app.set_version_flag("--version", std::string(hf_version()));
  app.require_subcommand(1);

  Common common;
  std::string endpoints, out, report_path, poses, conditions, manifest, csv, generated, reference;
  double fraction = -1.0;

  auto* trajgen = app.add_subcommand("trajgen", "interpolate a pose sequence between endpoints and validate it");
  add_common(trajgen, common, true);
  trajgen->add_option("--endpoints", endpoints, "endpoints JSON")->required();
  trajgen->add_option("--out", out, "pose sequence JSON to write")->required();
  trajgen->add_option("--report", report_path, "validation report JSON to write");

  auto* render = app.add_subcommand("render", "render depth/seg/keypoint frames and tracklets");
  add_common(render, common, true);
  render->add_option("--poses", poses, "pose sequence JSON")->required();
  render->add_option("--out", out, "output directory")->required();

  auto* pack = app.add_subcommand("pack", "mask and encode rendered conditions into latents");
  add_common(pack, common, false);
  pack->add_option("--conditions", conditions, "directory written by render")->required();
  pack->add_option("--out", out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "evaluate a clip manifest");
  add_common(eval, common, false);
  eval->add_option("--manifest", manifest, "JSON-lines clip manifest")->required();
  eval->add_option("--out", out, "report JSON to write")->required();
  eval->add_option("--csv", csv, "per-clip CSV to write");

  auto* filter = app.add_subcommand("filter", "drop the worst candidates by pose error");
  add_common(filter, common, false);
  filter->add_option("--manifest", manifest, "JSON-lines manifest with pose_error_mm")->required();
  filter->add_option("--out", out, "filtered manifest to write")->required();
  filter->add_option("--fraction", fraction, "discard fraction (default: metrics.discard_fraction)")
      ->check(CLI::Range(0.0, 1.0));

  auto* pipeline = app.add_subcommand("pipeline", "trajgen, render, pack and optional eval in one run");
  add_common(pipeline, common, true);
  pipeline->add_option("--endpoints", endpoints, "endpoints JSON")->required();
  pipeline->add_option("--out", out, "artifact directory")->required();
  pipeline->add_option("--generated", generated, "frames from the external model (optional tracklets.json)");
  pipeline->add_option("--reference", reference, "ground-truth frames for PSNR/SSIM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  hf_config* cfg = nullptr;
  hf_status st = hf_config_load(common.config.c_str(), &cfg);
  if (st != HF_OK) return report(st);
  if (common.seed_override) st = hf_config_apply_seed_override(cfg, *common.seed_override);
  if (st == HF_OK && !common.hand.empty()) st = hf_config_set_asset(cfg, "hand", common.hand.c_str());
  if (st == HF_OK && !common.object.empty()) st = hf_config_set_asset(cfg, "object", common.object.c_str());
  if (st != HF_OK) {
    hf_config_free(cfg);
    return report(st);
  }

  auto opt = [](const std::string& s) { return s.empty() ? nullptr : s.c_str(); };
  if (*trajgen) {
    st = hf_run_trajgen(cfg, endpoints.c_str(), out.c_str(), opt(report_path), common.jobs);
  } else if (*render) {
    st = hf_run_render(cfg, poses.c_str(), out.c_str(), common.jobs);
  } else if (*pack) {
    st = hf_run_pack(cfg, conditions.c_str(), out.c_str(), common.jobs);
  } else if (*eval) {
    st = hf_run_eval(cfg, manifest.c_str(), out.c_str(), opt(csv), common.jobs);
  } else if (*filter) {
    st = hf_run_filter(cfg, manifest.c_str(), out.c_str(), fraction);
  } else {
    st = hf_run_pipeline(cfg, endpoints.c_str(), out.c_str(), opt(generated), opt(reference), common.jobs);
  }
  hf_config_free(cfg);
  return report(st);
}

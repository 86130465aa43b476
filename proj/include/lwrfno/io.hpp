#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lwrfno/evaluation.hpp"
#include "lwrfno/fno.hpp"
#include "lwrfno/scenario.hpp"
#include "lwrfno/training.hpp"

namespace lwrfno {

/// Fully resolved run configuration: grid + flux law + model + training +
/// dataset generation. Loaded from JSON and validated as a whole (CFL, mode
/// bounds, class ranges); violations raise std::invalid_argument naming the
/// broken invariant.
struct RunConfig {
  GridSpec grid;
  FundamentalDiagram fd;
  FnoConfig fno;
  TrainConfig train;
  DatasetSpec data;
};

RunConfig load_config(const std::filesystem::path& json_path);
void save_config(const RunConfig& cfg, const std::filesystem::path& json_path);

/// Shipped presets. `desk` fits a laptop CPU budget; `reference` mirrors the
/// full-scale hyperparameter table (50x600 grid, width 64, modes 24x128).
RunConfig desk_preset();
RunConfig reference_preset();

// --- dataset persistence ---
// A dataset directory holds manifest.json plus one raw little-endian f64
// file per encoded input and per solution field, row-major, shapes recorded
// in the manifest. Byte-identical for identical seeds.

void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// --- checkpoint persistence ---
// <stem>.json header (model config, grid, flux law, epoch, validation MAE,
// ordered tensor manifest with byte offsets) next to <stem>.bin holding raw
// little-endian doubles, complex tensors interleaved re/im. Loading recovers
// bit-identical parameters; truncated or oversized blobs fail naming the
// offending tensor.

struct Checkpoint {
  FnoConfig config;
  FnoParams params;
  FundamentalDiagram fd;
  GridSpec grid;
  int epoch = -1;
  double val_mae = 0.0;
  TrainMode mode = TrainMode::pi_fno;
  double lambda = 0.0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& stem);
Checkpoint load_checkpoint(const std::filesystem::path& stem);

// --- reports ---

void write_loss_csv(const LossReport& report, const std::filesystem::path& path);
/// CSV with header `class,mean_mae,std_mae,n`.
void write_eval_csv(const EvalReport& report, const std::filesystem::path& path);
/// Full report including percent errors and the fitted trendline.
void write_eval_json(const EvalReport& report, double u_max,
                     const std::filesystem::path& path);
void write_profiles_csv(const std::vector<ProfileRow>& rows,
                        const std::filesystem::path& path);

/// Raw little-endian doubles with a JSON sidecar recording the shape.
void write_field(const Tensor& field, const GridSpec& grid,
                 const std::filesystem::path& stem);

// low-level helpers shared by the formats (endianness made explicit so the
// files read back identically on any host)
void write_f64_le(std::ostream& out, const double* data, std::size_t count);
void read_f64_le(std::istream& in, double* data, std::size_t count);

}  // namespace lwrfno

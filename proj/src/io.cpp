#include "lwrfno/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace lwrfno {

using nlohmann::json;

namespace {

void byteswap_f64(double* data, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) {
    std::uint64_t bits;
    std::memcpy(&bits, data + k, 8);
    bits = __builtin_bswap64(bits);
    std::memcpy(data + k, &bits, 8);
  }
}

json grid_to_json(const GridSpec& g) {
  return {{"nx", g.nx}, {"nt", g.nt}, {"dx_m", g.dx_m}, {"dt_s", g.dt_s}};
}

GridSpec grid_from_json(const json& j, const FundamentalDiagram& fd) {
  return GridSpec::make(j.at("nx").get<int>(), j.at("nt").get<int>(),
                        j.at("dx_m").get<double>(), j.at("dt_s").get<double>(), fd);
}

json fd_to_json(const FundamentalDiagram& fd) {
  return {{"u_max_veh_km", fd.u_max()}, {"v_max_km_h", fd.v_max_kmh()}};
}

FundamentalDiagram fd_from_json(const json& j) {
  const double u_max = j.at("u_max_veh_km").get<double>();
  if (j.contains("v_max_km_h")) return FundamentalDiagram(u_max, j.at("v_max_km_h").get<double>());
  if (j.contains("q_max_veh_h"))
    return FundamentalDiagram::from_capacity(u_max, j.at("q_max_veh_h").get<double>());
  throw std::invalid_argument("config: flux law needs v_max_km_h or q_max_veh_h");
}

ScenarioKind kind_from_string(const std::string& s) {
  if (s == "forward") return ScenarioKind::forward;
  if (s == "inverse") return ScenarioKind::inverse;
  throw std::invalid_argument("config: kind must be forward or inverse, got " + s);
}

std::string kind_to_string(ScenarioKind k) {
  return k == ScenarioKind::forward ? "forward" : "inverse";
}

std::ofstream open_out(const std::filesystem::path& p, std::ios::openmode mode) {
  std::ofstream f(p, mode);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

std::ifstream open_in(const std::filesystem::path& p, std::ios::openmode mode) {
  std::ifstream f(p, mode);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  return f;
}

}  // namespace

void write_f64_le(std::ostream& out, const double* data, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(8 * count));
  } else {
    std::vector<double> buf(data, data + count);
    byteswap_f64(buf.data(), buf.size());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(8 * count));
  }
}

void read_f64_le(std::istream& in, double* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(8 * count));
  if (in.gcount() != static_cast<std::streamsize>(8 * count))
    throw std::runtime_error("raw f64 file shorter than expected");
  if constexpr (std::endian::native == std::endian::big) byteswap_f64(data, count);
}

RunConfig load_config(const std::filesystem::path& json_path) {
  std::ifstream f = open_in(json_path, std::ios::in);
  json j = json::parse(f);

  FundamentalDiagram fd = fd_from_json(j.at("fd"));
  GridSpec grid = grid_from_json(j.at("grid"), fd);

  FnoConfig fno;
  const json& jm = j.at("fno");
  fno.n_layers = jm.value("layers", 4);
  fno.width = jm.value("width", 16);
  fno.modes_x = jm.value("modes_x", 8);
  fno.modes_t = jm.value("modes_t", 16);
  fno.proj_hidden = jm.value("proj_hidden", 128);
  fno.in_channels = 4;
  const std::string act = jm.value("activation", std::string("gelu"));
  if (act == "gelu")
    fno.act = Activation::gelu;
  else if (act == "relu")
    fno.act = Activation::relu;
  else
    throw std::invalid_argument("config: activation must be gelu or relu, got " + act);
  fno.grid = grid;
  fno.validate();

  TrainConfig train;
  const json& jt = j.at("train");
  const std::string mode = jt.value("mode", std::string("pi_fno"));
  if (mode == "fno")
    train.mode = TrainMode::fno;
  else if (mode == "pi_fno")
    train.mode = TrainMode::pi_fno;
  else
    throw std::invalid_argument("config: train mode must be fno or pi_fno, got " + mode);
  train.lambda = jt.value("lambda", 2.0);
  train.epochs = jt.value("epochs", 100);
  train.batch_size = jt.value("batch_size", 16);
  train.lr = jt.value("lr", 1e-3);
  train.lr_step_epochs = jt.value("lr_step_epochs", 25);
  train.lr_decay = jt.value("lr_decay", 0.5);
  train.seed = jt.value("seed", std::uint64_t{1});
  train.val_fraction = jt.value("val_fraction", 0.1);
  if (train.lambda < 0.0) throw std::invalid_argument("config: lambda must be >= 0");
  if (train.epochs < 0) throw std::invalid_argument("config: epochs must be >= 0");
  if (train.batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
  if (!(train.lr > 0.0)) throw std::invalid_argument("config: lr must be > 0");
  if (train.lr_step_epochs < 1)
    throw std::invalid_argument("config: lr_step_epochs must be >= 1");
  if (!(train.lr_decay > 0.0 && train.lr_decay <= 1.0))
    throw std::invalid_argument("config: lr_decay must be in (0, 1]");

  DatasetSpec data;
  const json& jd = j.at("data");
  data.ic_classes = jd.at("ic_classes").get<std::vector<int>>();
  data.bc_classes = jd.at("bc_classes").get<std::vector<int>>();
  data.samples_per_class_pair = jd.at("samples_per_class_pair").get<int>();
  data.kind = kind_from_string(jd.value("kind", std::string("forward")));
  data.seed = jd.value("seed", std::uint64_t{42});
  data.n_trajectories = jd.value("n_trajectories", 10);
  if (data.ic_classes.empty() || data.bc_classes.empty())
    throw std::invalid_argument("config: ic_classes and bc_classes must be non-empty");
  for (int c : data.ic_classes)
    if (c < 0 || c > 9) throw std::invalid_argument("config: ic classes must be in [0, 9]");
  for (int c : data.bc_classes)
    if (c < 0 || c > 8) throw std::invalid_argument("config: bc classes must be in [0, 8]");
  if (data.samples_per_class_pair < 1)
    throw std::invalid_argument("config: samples_per_class_pair must be >= 1");
  if (data.n_trajectories < 1)
    throw std::invalid_argument("config: n_trajectories must be >= 1");

  return RunConfig{grid, fd, fno, train, data};
}

void save_config(const RunConfig& cfg, const std::filesystem::path& json_path) {
  json j;
  j["grid"] = grid_to_json(cfg.grid);
  j["fd"] = fd_to_json(cfg.fd);
  j["fno"] = {{"layers", cfg.fno.n_layers},
              {"width", cfg.fno.width},
              {"modes_x", cfg.fno.modes_x},
              {"modes_t", cfg.fno.modes_t},
              {"proj_hidden", cfg.fno.proj_hidden},
              {"activation", cfg.fno.act == Activation::gelu ? "gelu" : "relu"}};
  j["train"] = {{"mode", cfg.train.mode == TrainMode::fno ? "fno" : "pi_fno"},
                {"lambda", cfg.train.lambda},
                {"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"lr", cfg.train.lr},
                {"lr_step_epochs", cfg.train.lr_step_epochs},
                {"lr_decay", cfg.train.lr_decay},
                {"seed", cfg.train.seed},
                {"val_fraction", cfg.train.val_fraction}};
  j["data"] = {{"ic_classes", cfg.data.ic_classes},
               {"bc_classes", cfg.data.bc_classes},
               {"samples_per_class_pair", cfg.data.samples_per_class_pair},
               {"kind", kind_to_string(cfg.data.kind)},
               {"seed", cfg.data.seed},
               {"n_trajectories", cfg.data.n_trajectories}};
  std::ofstream f = open_out(json_path, std::ios::out);
  f << j.dump(2) << "\n";
}

RunConfig desk_preset() {
  FundamentalDiagram fd(120.0, 60.0);
  GridSpec grid = GridSpec::make(32, 120, 70.0, 4.0, fd);
  FnoConfig fno;
  fno.n_layers = 4;
  fno.width = 16;
  fno.modes_x = 8;
  fno.modes_t = 16;
  fno.proj_hidden = 128;
  fno.in_channels = 4;
  fno.act = Activation::gelu;
  fno.grid = grid;
  TrainConfig train;
  train.mode = TrainMode::pi_fno;
  train.lambda = 2.0;
  train.epochs = 100;
  train.batch_size = 8;
  train.lr = 3e-3;
  train.lr_step_epochs = 25;
  train.lr_decay = 0.5;
  train.seed = 7;
  train.val_fraction = 0.1;
  DatasetSpec data;
  data.ic_classes = {0, 1, 2, 3};
  data.bc_classes = {0, 1, 2};
  data.samples_per_class_pair = 20;
  data.kind = ScenarioKind::forward;
  data.seed = 42;
  data.n_trajectories = 10;
  return RunConfig{grid, fd, fno, train, data};
}

RunConfig reference_preset() {
  FundamentalDiagram fd = FundamentalDiagram::from_capacity(120.0, 1800.0);
  GridSpec grid = GridSpec::make(50, 600, 20.0, 1.0, fd);
  FnoConfig fno;
  fno.n_layers = 4;
  fno.width = 64;
  fno.modes_x = 24;
  fno.modes_t = 128;
  fno.proj_hidden = 128;
  fno.in_channels = 4;
  fno.act = Activation::gelu;
  fno.grid = grid;
  TrainConfig train;
  train.mode = TrainMode::pi_fno;
  train.lambda = 2.0;
  train.epochs = 500;
  train.batch_size = 128;
  train.lr = 1e-3;
  train.lr_step_epochs = 100;
  train.lr_decay = 0.5;
  train.seed = 7;
  train.val_fraction = 0.1;
  DatasetSpec data;
  data.ic_classes = {0, 1, 2, 3};
  data.bc_classes = {0, 1, 2};
  data.samples_per_class_pair = 433;  // ~5200 training fields
  data.kind = ScenarioKind::forward;
  data.seed = 42;
  data.n_trajectories = 10;
  return RunConfig{grid, fd, fno, train, data};
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["format"] = "lwrfno-dataset-v1";
  manifest["grid"] = grid_to_json(ds.grid);
  manifest["fd"] = fd_to_json(ds.fd);
  manifest["spec"] = {{"ic_classes", ds.spec.ic_classes},
                      {"bc_classes", ds.spec.bc_classes},
                      {"samples_per_class_pair", ds.spec.samples_per_class_pair},
                      {"kind", kind_to_string(ds.spec.kind)},
                      {"seed", ds.spec.seed},
                      {"n_trajectories", ds.spec.n_trajectories}};
  json samples = json::array();
  for (std::size_t s = 0; s < ds.samples.size(); ++s) {
    const Sample& sm = ds.samples[s];
    std::ostringstream stem;
    stem << "sample_" << std::setw(6) << std::setfill('0') << s;
    json entry;
    entry["id"] = s;
    entry["ic_class"] = sm.scenario.ic_class;
    entry["bc_class"] = sm.scenario.bc_class;
    entry["seed"] = sm.scenario.seed;
    entry["input"] = stem.str() + ".input.f64";
    entry["field"] = stem.str() + ".field.f64";
    entry["input_shape"] = sm.input.shape();
    entry["field_shape"] = sm.field.shape();
    samples.push_back(entry);

    {
      std::ofstream f = open_out(dir / (stem.str() + ".input.f64"), std::ios::binary);
      write_f64_le(f, sm.input.data(), sm.input.size());
    }
    {
      std::ofstream f = open_out(dir / (stem.str() + ".field.f64"), std::ios::binary);
      write_f64_le(f, sm.field.data(), sm.field.size());
    }
  }
  manifest["samples"] = samples;
  std::ofstream f = open_out(dir / "manifest.json", std::ios::out);
  f << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream mf = open_in(dir / "manifest.json", std::ios::in);
  json manifest = json::parse(mf);
  if (manifest.value("format", std::string{}) != "lwrfno-dataset-v1")
    throw std::runtime_error("load_dataset: unknown manifest format");

  FundamentalDiagram fd = fd_from_json(manifest.at("fd"));
  GridSpec grid = grid_from_json(manifest.at("grid"), fd);
  DatasetSpec spec;
  const json& js = manifest.at("spec");
  spec.ic_classes = js.at("ic_classes").get<std::vector<int>>();
  spec.bc_classes = js.at("bc_classes").get<std::vector<int>>();
  spec.samples_per_class_pair = js.at("samples_per_class_pair").get<int>();
  spec.kind = kind_from_string(js.at("kind").get<std::string>());
  spec.seed = js.at("seed").get<std::uint64_t>();
  spec.n_trajectories = js.value("n_trajectories", 10);

  Dataset ds(grid, fd, spec);
  const json& samples = manifest.at("samples");
  ds.samples.resize(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const json& entry = samples[s];
    Sample& sm = ds.samples[s];
    sm.scenario.ic_class = entry.at("ic_class").get<int>();
    sm.scenario.bc_class = entry.at("bc_class").get<int>();
    sm.scenario.seed = entry.at("seed").get<std::uint64_t>();
    sm.scenario.kind = spec.kind;

    const auto in_shape = entry.at("input_shape").get<std::vector<std::int64_t>>();
    const auto f_shape = entry.at("field_shape").get<std::vector<std::int64_t>>();
    sm.input = Tensor(in_shape);
    sm.field = Tensor(f_shape);
    {
      std::ifstream f =
          open_in(dir / entry.at("input").get<std::string>(), std::ios::binary);
      read_f64_le(f, sm.input.data(), sm.input.size());
    }
    {
      std::ifstream f =
          open_in(dir / entry.at("field").get<std::string>(), std::ios::binary);
      read_f64_le(f, sm.field.data(), sm.field.size());
    }
    // reconstruct scenario series from the encoded channels for bookkeeping
    const std::int64_t nx = grid.nx, nt = grid.nt;
    sm.scenario.ic.resize(nx);
    for (std::int64_t i = 0; i < nx; ++i)
      sm.scenario.ic[i] = sm.input.at3(0, i, 0) * fd.u_max();
    sm.scenario.bc.assign(nt, 0.0);
    if (spec.kind == ScenarioKind::forward)
      for (std::int64_t j = 0; j < nt; ++j)
        sm.scenario.bc[j] = sm.input.at3(0, nx - 1, j) * fd.u_max();
    if (spec.kind == ScenarioKind::inverse) {
      sm.scenario.obs_mask.assign(static_cast<std::size_t>(nx) * nt, 0);
      for (std::int64_t i = 0; i < nx; ++i)
        for (std::int64_t j = 0; j < nt; ++j)
          sm.scenario.obs_mask[i * nt + j] = sm.input.at3(1, i, j) != 0.0 && j != 0 ? 1 : 0;
    }
  }
  return ds;
}

namespace {

struct TensorEntry {
  std::string name;
  std::vector<std::int64_t> shape;
  bool complex_valued;
  std::size_t scalar_count;  // doubles on disk
};

std::vector<TensorEntry> checkpoint_layout(const FnoConfig& cfg) {
  std::vector<TensorEntry> entries;
  const std::int64_t w = cfg.width;
  entries.push_back({"lift_weight", {w, cfg.in_channels}, false, 0});
  entries.push_back({"lift_bias", {w}, false, 0});
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string tag = "layer" + std::to_string(l) + ".";
    entries.push_back({tag + "pointwise_weight", {w, w}, false, 0});
    entries.push_back({tag + "pointwise_bias", {w}, false, 0});
    entries.push_back({tag + "spectral_weight", {w, w, cfg.modes_x, cfg.modes_t}, true, 0});
  }
  entries.push_back({"proj1_weight", {cfg.proj_hidden, w}, false, 0});
  entries.push_back({"proj1_bias", {cfg.proj_hidden}, false, 0});
  entries.push_back({"proj2_weight", {1, cfg.proj_hidden}, false, 0});
  entries.push_back({"proj2_bias", {1}, false, 0});
  for (auto& e : entries) {
    std::size_t n = 1;
    for (auto d : e.shape) n *= static_cast<std::size_t>(d);
    e.scalar_count = e.complex_valued ? 2 * n : n;
  }
  return entries;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& stem) {
  const auto entries = checkpoint_layout(ckpt.config);
  FnoParams& p = const_cast<FnoParams&>(ckpt.params);
  auto views = param_views(p);
  if (views.size() != entries.size())
    throw std::logic_error("save_checkpoint: layout/view mismatch");

  json j;
  j["format"] = "lwrfno-checkpoint-v1";
  j["grid"] = grid_to_json(ckpt.grid);
  j["fd"] = fd_to_json(ckpt.fd);
  j["fno"] = {{"layers", ckpt.config.n_layers},
              {"width", ckpt.config.width},
              {"modes_x", ckpt.config.modes_x},
              {"modes_t", ckpt.config.modes_t},
              {"proj_hidden", ckpt.config.proj_hidden},
              {"activation", ckpt.config.act == Activation::gelu ? "gelu" : "relu"}};
  j["epoch"] = ckpt.epoch;
  j["val_mae"] = ckpt.val_mae;
  j["mode"] = ckpt.mode == TrainMode::fno ? "fno" : "pi_fno";
  j["lambda"] = ckpt.lambda;

  json tensors = json::array();
  std::size_t offset = 0;
  for (std::size_t t = 0; t < entries.size(); ++t) {
    tensors.push_back({{"name", entries[t].name},
                       {"shape", entries[t].shape},
                       {"dtype", entries[t].complex_valued ? "c128" : "f64"},
                       {"offset_bytes", offset * 8},
                       {"scalar_count", entries[t].scalar_count}});
    offset += entries[t].scalar_count;
  }
  j["tensors"] = tensors;
  j["blob"] = stem.filename().string() + ".bin";

  {
    std::ofstream f = open_out(stem.string() + ".json", std::ios::out);
    f << j.dump(2) << "\n";
  }
  std::ofstream blob = open_out(stem.string() + ".bin", std::ios::binary);
  for (std::size_t t = 0; t < views.size(); ++t) {
    if (views[t].size != entries[t].scalar_count)
      throw std::logic_error("save_checkpoint: tensor size mismatch for " + entries[t].name);
    write_f64_le(blob, views[t].data, views[t].size);
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& stem) {
  std::ifstream hf = open_in(stem.string() + ".json", std::ios::in);
  json j = json::parse(hf);
  if (j.value("format", std::string{}) != "lwrfno-checkpoint-v1")
    throw std::runtime_error("load_checkpoint: unknown format");

  FundamentalDiagram fd = fd_from_json(j.at("fd"));
  GridSpec grid = grid_from_json(j.at("grid"), fd);

  FnoConfig cfg;
  const json& jm = j.at("fno");
  cfg.n_layers = jm.at("layers").get<int>();
  cfg.width = jm.at("width").get<int>();
  cfg.modes_x = jm.at("modes_x").get<int>();
  cfg.modes_t = jm.at("modes_t").get<int>();
  cfg.proj_hidden = jm.at("proj_hidden").get<int>();
  cfg.in_channels = 4;
  cfg.act = jm.at("activation").get<std::string>() == "relu" ? Activation::relu
                                                             : Activation::gelu;
  cfg.grid = grid;
  cfg.validate();

  Checkpoint ckpt{cfg, init_params(cfg, 0), fd, grid,
                  j.value("epoch", -1), j.value("val_mae", 0.0),
                  j.value("mode", std::string("pi_fno")) == "fno" ? TrainMode::fno
                                                                  : TrainMode::pi_fno,
                  j.value("lambda", 0.0)};

  const auto entries = checkpoint_layout(cfg);
  auto views = param_views(ckpt.params);

  const std::filesystem::path blob_path =
      stem.parent_path() / j.at("blob").get<std::string>();
  const auto blob_size = std::filesystem::file_size(blob_path);
  std::ifstream blob = open_in(blob_path, std::ios::binary);

  const json& tensors = j.at("tensors");
  if (tensors.size() != entries.size())
    throw std::runtime_error("load_checkpoint: tensor manifest length mismatch");
  std::size_t total = 0;
  for (std::size_t t = 0; t < entries.size(); ++t) {
    const std::size_t count = tensors[t].at("scalar_count").get<std::size_t>();
    if (count != entries[t].scalar_count)
      throw std::runtime_error("load_checkpoint: blob length mismatch for tensor " +
                               entries[t].name);
    total += count;
  }
  if (blob_size != total * 8)
    throw std::runtime_error("load_checkpoint: blob size " + std::to_string(blob_size) +
                             " does not match manifest total " + std::to_string(total * 8));
  for (std::size_t t = 0; t < views.size(); ++t) {
    try {
      read_f64_le(blob, views[t].data, views[t].size);
    } catch (const std::exception&) {
      throw std::runtime_error("load_checkpoint: blob truncated in tensor " + entries[t].name);
    }
  }
  return ckpt;
}

void write_loss_csv(const LossReport& report, const std::filesystem::path& path) {
  std::ofstream f = open_out(path, std::ios::out);
  f << "epoch,lr,data_loss,phys_loss,total_loss,train_mae,val_mae\n";
  f << std::setprecision(17);
  for (std::size_t e = 0; e < report.epochs.size(); ++e) {
    const EpochStats& st = report.epochs[e];
    f << e << "," << st.lr << "," << st.data_loss << "," << st.phys_loss << ","
      << st.total_loss << "," << st.train_mae << "," << st.val_mae << "\n";
  }
}

void write_eval_csv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream f = open_out(path, std::ios::out);
  f << "class,mean_mae,std_mae,n\n";
  f << std::setprecision(17);
  for (const ClassRow& r : report.rows)
    f << report.axis << r.class_index << "," << r.mean_mae << "," << r.std_mae << ","
      << r.n << "\n";
}

void write_eval_json(const EvalReport& report, double u_max,
                     const std::filesystem::path& path) {
  json j;
  j["axis"] = std::string(1, report.axis);
  j["model"] = report.model_tag;
  j["problem"] = report.problem_tag;
  j["knot"] = report.knot;
  j["u_max_veh_km"] = u_max;
  j["trendline"] = {{"train_level_veh_km", report.train_level},
                    {"test_slope_veh_km_per_class", report.test_slope},
                    {"test_slope_pct_per_class", 100.0 * report.test_slope / u_max}};
  json rows = json::array();
  for (const ClassRow& r : report.rows)
    rows.push_back({{"class", r.class_index},
                    {"mean_mae_veh_km", r.mean_mae},
                    {"std_mae_veh_km", r.std_mae},
                    {"mean_mae_pct", r.mean_mae_pct},
                    {"n", r.n}});
  j["rows"] = rows;
  std::ofstream f = open_out(path, std::ios::out);
  f << j.dump(2) << "\n";
}

void write_profiles_csv(const std::vector<ProfileRow>& rows,
                        const std::filesystem::path& path) {
  std::ofstream f = open_out(path, std::ios::out);
  f << "t_s,x_m,u_true,u_pred\n";
  f << std::setprecision(17);
  for (const ProfileRow& r : rows)
    f << r.t_s << "," << r.x_m << "," << r.u_true << "," << r.u_pred << "\n";
}

void write_field(const Tensor& field, const GridSpec& grid,
                 const std::filesystem::path& stem) {
  {
    std::ofstream f = open_out(stem.string() + ".f64", std::ios::binary);
    write_f64_le(f, field.data(), field.size());
  }
  json j;
  j["format"] = "lwrfno-field-v1";
  j["shape"] = field.shape();
  j["grid"] = grid_to_json(grid);
  j["file"] = stem.filename().string() + ".f64";
  std::ofstream f = open_out(stem.string() + ".json", std::ios::out);
  f << j.dump(2) << "\n";
}

}  // namespace lwrfno

#include "cdt/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cdt/builders.hpp"

namespace cdt {

namespace {

using nlohmann::json;

// Shortest round-trip representation; locale-independent, so repeated runs
// emit byte-identical files.
std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

json solve_row(const SolveResult& r) {
  json j;
  j["mu"] = r.mu;
  j["lambda"] = r.lambda;
  j["rate_bits"] = r.rate_bits;
  j["distortion"] = r.distortion;
  j["input_cost"] = r.input_cost;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

void write_row_csv(const SolveResult& r, std::ostream& os) {
  os << fmt(r.mu) << ',' << fmt(r.lambda) << ',' << fmt(r.rate_bits) << ','
     << fmt(r.distortion) << ',' << fmt(r.input_cost) << ',' << r.iterations << ','
     << (r.converged ? 1 : 0) << '\n';
}

constexpr const char* kCurveHeader = "mu,lambda,rate_bits,distortion,input_cost,iterations,converged";

int require_positive_int(const json& j, const char* key) {
  if (!j.contains(key)) throw std::runtime_error(std::string("missing field '") + key + "'");
  if (!j[key].is_number_integer() || j[key].get<long long>() <= 0)
    throw std::runtime_error(std::string("field '") + key + "' must be a positive integer");
  return j[key].get<int>();
}

std::vector<double> double_array(const json& j, const char* key, size_t expected) {
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != expected) {
    std::ostringstream os;
    os << "field '" << key << "' must be an array of length " << expected;
    throw std::runtime_error(os.str());
  }
  std::vector<double> out(expected);
  for (size_t i = 0; i < expected; ++i) {
    if (!a[i].is_number()) {
      std::ostringstream os;
      os << "field '" << key << "' has a non-numeric entry at index " << i;
      throw std::runtime_error(os.str());
    }
    out[i] = a[i].get<double>();
  }
  return out;
}

ChannelModel channel_from_json(const json& j) {
  int nx = require_positive_int(j, "nx");
  int ns = require_positive_int(j, "ns");
  int ny = require_positive_int(j, "ny");
  int nz = require_positive_int(j, "nz");

  Pmf p_s(double_array(j, "p_s", ns));

  std::vector<double> x_values, s_values;
  if (j.contains("x_values")) x_values = double_array(j, "x_values", nx);
  if (j.contains("s_values")) s_values = double_array(j, "s_values", ns);

  ChannelModel m;
  bool pf = j.value("perfect_feedback", false);
  if (pf) {
    if (!j.contains("kernel_y"))
      throw std::runtime_error("perfect_feedback channels need field 'kernel_y'");
    if (nz != ny) throw std::runtime_error("perfect_feedback requires nz == ny");
    const json& k = j["kernel_y"];
    if (!k.is_array() || static_cast<int>(k.size()) != nx)
      throw std::runtime_error("kernel_y must have nx rows");
    Tensor3 w(nx, ns, ny, 0.0);
    for (int x = 0; x < nx; ++x) {
      if (!k[x].is_array() || static_cast<int>(k[x].size()) != ns)
        throw std::runtime_error("kernel_y[" + std::to_string(x) + "] must have ns rows");
      for (int s = 0; s < ns; ++s) {
        const json& row = k[x][s];
        if (!row.is_array() || static_cast<int>(row.size()) != ny) {
          std::ostringstream os;
          os << "kernel_y[" << x << "][" << s << "] must have ny entries";
          throw std::runtime_error(os.str());
        }
        for (int y = 0; y < ny; ++y) w(x, s, y) = row[y].get<double>();
      }
    }
    m.channel = from_perfect_feedback(w, p_s, x_values, s_values);
  } else {
    if (!j.contains("kernel")) throw std::runtime_error("missing field 'kernel'");
    const json& k = j["kernel"];
    if (!k.is_array() || static_cast<int>(k.size()) != nx)
      throw std::runtime_error("kernel must have nx rows");
    Tensor4 kern(nx, ns, ny, nz, 0.0);
    for (int x = 0; x < nx; ++x) {
      if (!k[x].is_array() || static_cast<int>(k[x].size()) != ns)
        throw std::runtime_error("kernel[" + std::to_string(x) + "] must have ns rows");
      for (int s = 0; s < ns; ++s) {
        const json& ys = k[x][s];
        if (!ys.is_array() || static_cast<int>(ys.size()) != ny) {
          std::ostringstream os;
          os << "kernel[" << x << "][" << s << "] must have ny rows";
          throw std::runtime_error(os.str());
        }
        for (int y = 0; y < ny; ++y) {
          const json& zs = ys[y];
          if (!zs.is_array() || static_cast<int>(zs.size()) != nz) {
            std::ostringstream os;
            os << "kernel[" << x << "][" << s << "][" << y << "] must have nz entries";
            throw std::runtime_error(os.str());
          }
          for (int z = 0; z < nz; ++z) kern(x, s, y, z) = zs[z].get<double>();
        }
      }
    }
    m.channel = make_channel(kern, p_s, x_values, s_values);
  }

  if (j.contains("distortion")) {
    const json& dj = j["distortion"];
    if (!dj.is_object() || !dj.contains("d") || !dj.contains("shat_values"))
      throw std::runtime_error("distortion must be an object with 'd' and 'shat_values'");
    const json& rows = dj["d"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != ns)
      throw std::runtime_error("distortion.d must have ns rows");
    size_t nhat = dj["shat_values"].size();
    DistortionMatrix d;
    d.shat_values = double_array(dj, "shat_values", nhat);
    d.d = Matrix(ns, static_cast<int>(nhat), 0.0);
    for (int s = 0; s < ns; ++s) {
      if (!rows[s].is_array() || rows[s].size() != nhat) {
        std::ostringstream os;
        os << "distortion.d[" << s << "] must have " << nhat << " entries";
        throw std::runtime_error(os.str());
      }
      for (size_t h = 0; h < nhat; ++h) {
        double v = rows[s][h].get<double>();
        if (!(v >= 0.0) || !std::isfinite(v)) {
          std::ostringstream os;
          os << "distortion.d[" << s << "][" << h << "] must be finite and >= 0";
          throw std::runtime_error(os.str());
        }
        d.d(s, static_cast<int>(h)) = v;
      }
    }
    m.distortion = std::move(d);
  }

  if (j.contains("cost")) m.cost.b = double_array(j, "cost", nx);

  std::string mode = j.value("estimator_mode", "restricted");
  if (mode == "restricted")
    m.estimator_mode = EstimatorMode::kRestricted;
  else if (mode == "posterior_mean")
    m.estimator_mode = EstimatorMode::kPosteriorMean;
  else
    throw std::runtime_error("estimator_mode must be 'restricted' or 'posterior_mean'");
  if (m.estimator_mode == EstimatorMode::kPosteriorMean && s_values.empty())
    throw std::runtime_error("estimator_mode 'posterior_mean' requires s_values");

  m.id = j.value("id", "");
  return m;
}

json channel_to_json(const ChannelModel& m) {
  const StateChannel& ch = m.channel;
  json j;
  j["nx"] = ch.nx;
  j["ns"] = ch.ns;
  j["ny"] = ch.ny;
  j["nz"] = ch.nz;
  j["p_s"] = ch.p_s.probs();
  if (ch.perfect_feedback) {
    j["perfect_feedback"] = true;
    json k = json::array();
    for (int x = 0; x < ch.nx; ++x) {
      json xs = json::array();
      for (int s = 0; s < ch.ns; ++s) {
        json row = json::array();
        for (int y = 0; y < ch.ny; ++y) row.push_back(ch.kernel_y(x, s, y));
        xs.push_back(std::move(row));
      }
      k.push_back(std::move(xs));
    }
    j["kernel_y"] = std::move(k);
  } else {
    json k = json::array();
    for (int x = 0; x < ch.nx; ++x) {
      json xs = json::array();
      for (int s = 0; s < ch.ns; ++s) {
        json yrows = json::array();
        for (int y = 0; y < ch.ny; ++y) {
          json row = json::array();
          for (int z = 0; z < ch.nz; ++z) row.push_back(ch.kernel(x, s, y, z));
          yrows.push_back(std::move(row));
        }
        xs.push_back(std::move(yrows));
      }
      k.push_back(std::move(xs));
    }
    j["kernel"] = std::move(k);
  }
  if (!ch.x_values.empty()) j["x_values"] = ch.x_values;
  if (!ch.s_values.empty()) j["s_values"] = ch.s_values;
  if (m.distortion) {
    json dj;
    json rows = json::array();
    for (int s = 0; s < m.distortion->d.rows(); ++s) {
      json row = json::array();
      for (int h = 0; h < m.distortion->d.cols(); ++h) row.push_back(m.distortion->d(s, h));
      rows.push_back(std::move(row));
    }
    dj["d"] = std::move(rows);
    dj["shat_values"] = m.distortion->shat_values;
    j["distortion"] = std::move(dj);
  }
  if (!m.cost.b.empty()) j["cost"] = m.cost.b;
  j["estimator_mode"] =
      m.estimator_mode == EstimatorMode::kPosteriorMean ? "posterior_mean" : "restricted";
  if (!m.id.empty()) j["id"] = m.id;
  return j;
}

void with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  fn(f);
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions so;
  so.mu = cfg.mu;
  so.cost_limit = cfg.cost_limit;
  so.outer_tol = cfg.tol;
  so.max_outer_iters = cfg.max_iters;
  so.dual_step0 = cfg.dual_step0;
  so.dual_iters = cfg.dual_iters;
  so.dual_tol = cfg.dual_tol;
  so.lambda0 = cfg.lambda0;
  so.record_trace = cfg.trace;
  return so;
}

ChannelModel resolve_model(const RunConfig& cfg) {
  if (cfg.channel_path && cfg.preset)
    throw std::runtime_error("give exactly one channel source (--channel or a preset)");
  if (cfg.channel_path) return load_channel(*cfg.channel_path);
  if (cfg.preset) return build_preset(*cfg.preset);
  throw std::runtime_error("a channel source is required (--channel or a preset)");
}

}  // namespace

ChannelModel load_channel(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open channel file: " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    ChannelModel m = channel_from_json(j);
    if (m.id.empty()) m.id = path;
    return m;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_channel(const ChannelModel& m, const std::string& path) {
  with_output(path, [&](std::ostream& os) { os << channel_to_json(m).dump(2) << '\n'; });
}

void write_solve_csv(const SolveResult& r, std::ostream& os) {
  os << kCurveHeader << '\n';
  write_row_csv(r, os);
}

void write_curve_csv(const TradeoffCurve& curve, std::ostream& os) {
  os << kCurveHeader << '\n';
  for (const auto& r : curve.points) write_row_csv(r, os);
}

void write_solve_json(const SolveResult& r, std::ostream& os) {
  os << solve_row(r).dump(2) << '\n';
}

void write_curve_json(const TradeoffCurve& curve, std::ostream& os) {
  json rows = json::array();
  for (const auto& r : curve.points) rows.push_back(solve_row(r));
  os << rows.dump(2) << '\n';
}

void write_trace_csv(const std::vector<TraceRow>& trace, std::ostream& os) {
  os << "iter,objective_nats,lambda,cost,distortion\n";
  for (const auto& t : trace)
    os << t.iter << ',' << fmt(t.objective_nats) << ',' << fmt(t.lambda) << ',' << fmt(t.cost)
       << ',' << fmt(t.distortion) << '\n';
}

std::vector<CurvePoint> read_curve_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("curve CSV: empty file");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    out.push_back(cur);
    return out;
  };
  auto header = split(line);
  int i_rate = -1, i_dist = -1, i_conv = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "rate_bits") i_rate = static_cast<int>(i);
    if (header[i] == "distortion") i_dist = static_cast<int>(i);
    if (header[i] == "converged") i_conv = static_cast<int>(i);
  }
  if (i_rate < 0 || i_dist < 0 || i_conv < 0)
    throw std::runtime_error("curve CSV: header must contain rate_bits, distortion, converged");

  std::vector<CurvePoint> pts;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "curve CSV: line " << line_no << " has " << cells.size() << " cells, expected "
         << header.size();
      throw std::runtime_error(os.str());
    }
    try {
      CurvePoint p;
      p.rate_bits = std::stod(cells[i_rate]);
      p.distortion = std::stod(cells[i_dist]);
      p.converged = std::stoi(cells[i_conv]) != 0;
      pts.push_back(p);
    } catch (const std::exception&) {
      std::ostringstream os;
      os << "curve CSV: malformed number on line " << line_no;
      throw std::runtime_error(os.str());
    }
  }
  return pts;
}

std::vector<double> parse_mu_grid(const std::string& spec) {
  auto comma = spec.find(',');
  if (comma == std::string::npos)
    throw std::runtime_error("mu grid: expected start:stop:count,geometric|linear");
  std::string range = spec.substr(0, comma);
  std::string kind = spec.substr(comma + 1);
  double start, stop;
  int count;
  char c1, c2;
  std::istringstream rs(range);
  if (!(rs >> start >> c1 >> stop >> c2 >> count) || c1 != ':' || c2 != ':')
    throw std::runtime_error("mu grid: expected start:stop:count,geometric|linear");
  if (count < 1) throw std::runtime_error("mu grid: count must be >= 1");
  if (start < 0.0 || stop < start) throw std::runtime_error("mu grid: need 0 <= start <= stop");

  std::vector<double> grid;
  if (count == 1) {
    grid.push_back(start);
    return grid;
  }
  if (kind == "linear") {
    for (int i = 0; i < count; ++i)
      grid.push_back(start + (stop - start) * i / (count - 1));
  } else if (kind == "geometric") {
    if (start <= 0.0) throw std::runtime_error("mu grid: geometric needs start > 0");
    double ratio = std::pow(stop / start, 1.0 / (count - 1));
    for (int i = 0; i < count; ++i) grid.push_back(start * std::pow(ratio, i));
  } else {
    throw std::runtime_error("mu grid: kind must be 'geometric' or 'linear'");
  }
  grid.back() = stop;  // exact endpoint regardless of rounding
  return grid;
}

ChannelModel build_preset(const PresetSpec& spec) {
  if (spec.name == "binary") return build_binary_multiplicative(spec.q);
  if (spec.name == "awgn") {
    AwgnModelSpec s;
    s.power = std::pow(10.0, spec.power_db / 10.0);
    s.pam_order = spec.pam;
    s.state_levels = spec.state_levels;
    s.output_levels = spec.output_levels;
    s.output_range_sigma = spec.range_sigma;
    return build_fading_awgn(s);
  }
  throw std::runtime_error("unknown preset '" + spec.name + "' (expected binary or awgn)");
}

int run(const RunConfig& cfg, std::ostream& err) {
  try {
    switch (cfg.command) {
      case Command::kSolve: {
        ChannelModel m = resolve_model(cfg);
        if (cfg.trace && cfg.out_path.empty())
          throw std::runtime_error("--trace needs --out (trace goes to <out>.trace.csv)");
        SolveResult r = solve(m, solve_options(cfg));
        with_output(cfg.out_path, [&](std::ostream& os) {
          cfg.format == OutputFormat::kJson ? write_solve_json(r, os) : write_solve_csv(r, os);
        });
        if (cfg.trace)
          with_output(cfg.out_path + ".trace.csv",
                      [&](std::ostream& os) { write_trace_csv(r.trace, os); });
        if (!r.converged) {
          err << "warning: solve did not converge within " << cfg.max_iters << " iterations\n";
          return 2;
        }
        return 0;
      }
      case Command::kSweep: {
        ChannelModel m = resolve_model(cfg);
        std::vector<double> grid =
            cfg.mu_grid ? parse_mu_grid(*cfg.mu_grid) : default_mu_grid();
        SweepOptions sw;
        sw.solve = solve_options(cfg);
        sw.solve.record_trace = false;  // per-point traces are a solve-command feature
        sw.warm_start = cfg.warm_start;
        sw.jobs = cfg.jobs;
        TradeoffCurve curve = sweep(m, grid, sw);
        with_output(cfg.out_path, [&](std::ostream& os) {
          cfg.format == OutputFormat::kJson ? write_curve_json(curve, os)
                                            : write_curve_csv(curve, os);
        });
        int n_bad = 0;
        for (const auto& p : curve.points)
          if (!p.converged) ++n_bad;
        if (n_bad > 0) {
          err << "warning: " << n_bad << " sweep point(s) did not converge (flagged in output)\n";
          return 2;
        }
        return 0;
      }
      case Command::kPreset: {
        if (!cfg.preset) throw std::runtime_error("preset command needs a preset name");
        if (cfg.out_path.empty()) throw std::runtime_error("preset command needs --out");
        ChannelModel m = build_preset(*cfg.preset);
        save_channel(m, cfg.out_path);
        return 0;
      }
      case Command::kOracle: {
        ChannelModel m = resolve_model(cfg);
        GridOracleResult res = grid_oracle(m, cfg.mu, cfg.oracle_step);
        with_output(cfg.out_path, [&](std::ostream& os) {
          if (cfg.format == OutputFormat::kJson) {
            json j;
            j["objective_nats"] = res.objective_nats;
            j["p_x"] = res.p_x.probs();
            os << j.dump(2) << '\n';
          } else {
            os << "x,p_x,objective_nats\n";
            for (int x = 0; x < res.p_x.size(); ++x)
              os << x << ',' << fmt(res.p_x[x]) << ',' << fmt(res.objective_nats) << '\n';
          }
        });
        return 0;
      }
      case Command::kCheck: {
        if (cfg.check_path.empty()) throw std::runtime_error("check command needs a curve CSV path");
        std::ifstream f(cfg.check_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open curve file: " + cfg.check_path);
        auto pts = read_curve_csv(f);
        CurveCheckReport rep = check_curve_properties(pts, cfg.check_tol);
        with_output(cfg.out_path, [&](std::ostream& os) {
          os << "monotone: " << (rep.monotone_ok ? "ok" : "FAIL") << '\n';
          os << "concave: " << (rep.concave_ok ? "ok" : "FAIL") << '\n';
          for (const auto& v : rep.violations) os << "violation: " << v << '\n';
        });
        return rep.ok() ? 0 : 2;
      }
    }
    throw std::runtime_error("unknown command");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cdt

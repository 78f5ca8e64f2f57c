#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "funcrelu/constructors.hpp"
#include "funcrelu/discretize.hpp"
#include "funcrelu/legendre.hpp"
#include "funcrelu/pipeline.hpp"
#include "funcrelu/relu_net.hpp"
#include "funcrelu/simplicial.hpp"
#include "funcrelu/verify.hpp"
#include "json.hpp"

using namespace funcrelu;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Network JSON to `out` (stdout when empty), stats line to stderr so the
// JSON stream stays clean.
void emit_network(const ReluNetwork& net, const std::string& out, double build_ms,
                  const std::string& extra = "") {
  if (out.empty()) {
    std::cout << serialize(net) << '\n';
  } else {
    save_network(net, out);
  }
  std::cerr << "depth=" << net.depth() << " M=" << net.count_nonzero()
            << " build_ms=" << std::fixed << std::setprecision(3) << build_ms << extra
            << '\n';
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

// Numeric rows only; a non-numeric first row is taken as a header.
std::vector<std::vector<double>> numeric_rows(const std::string& path) {
  std::vector<std::vector<double>> out;
  auto rows = read_csv(path);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<double> v;
    try {
      for (const auto& c : rows[r]) {
        std::size_t used = 0;
        v.push_back(std::stod(c, &used));
      }
    } catch (const std::exception&) {
      if (r == 0) continue;
      throw std::runtime_error(path + ": row " + std::to_string(r + 1) + " is not numeric");
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::function<double(std::span<const double>)> builtin_node_function(const std::string& name,
                                                                        std::uint64_t seed) {
  if (name == "norm")
    return [](std::span<const double> y) {
      double a = 0.0;
      for (double v : y) a += v * v;
      return std::sqrt(a);
    };
  if (name == "ones") return [](std::span<const double>) { return 1.0; };
  if (name == "zeros") return [](std::span<const double>) { return 0.0; };
  if (name == "affine")
    return [](std::span<const double> y) {
      double a = 0.0;
      for (std::size_t k = 0; k < y.size(); ++k) a += static_cast<double>(k + 1) * y[k];
      return a;
    };
  if (name == "random") {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [rng](std::span<const double>) {
      return std::uniform_real_distribution<double>(-1.0, 1.0)(*rng);
    };
  }
  throw std::invalid_argument("unknown built-in node function '" + name +
                              "' (norm, ones, zeros, affine, random) and no such file");
}

InterpolationSpec node_values_from(const simplicial::ScaledGrid& grid, const std::string& values,
                                   std::uint64_t seed, std::size_t cap) {
  if (!std::filesystem::exists(values))
    return InterpolationSpec::sample(grid, builtin_node_function(values, seed), cap);
  if (grid.node_count() > cap) throw NodeCapExceeded(grid.node_count(), cap);
  // Rows are "flat_index,value" or "i_1,...,i_t,value".
  InterpolationSpec spec{grid, std::vector<double>(grid.node_count(),
                                                   std::numeric_limits<double>::quiet_NaN())};
  for (const auto& row : numeric_rows(values)) {
    std::size_t flat;
    if (row.size() == 2) {
      flat = static_cast<std::size_t>(row[0]);
    } else if (row.size() == grid.t() + 1) {
      std::vector<std::size_t> idx(grid.t());
      for (std::size_t k = 0; k < grid.t(); ++k) idx[k] = static_cast<std::size_t>(row[k]);
      flat = grid.flat_index(idx);
    } else {
      throw std::runtime_error(values + ": expected 2 or t+1 columns per row");
    }
    if (flat >= grid.node_count()) throw std::runtime_error(values + ": node index out of range");
    spec.node_values[flat] = row.back();
  }
  spec.validate();
  return spec;
}

// Input functions for `discretize`.
InputFunction builtin_input(const std::string& name, std::size_t s) {
  if (name == "zero") return {[](std::span<const double>) { return 0.0; }, name};
  if (name == "one") return {[](std::span<const double>) { return 1.0; }, name};
  if (name == "abs") return {[](std::span<const double> x) { return std::abs(x[0]); }, name};
  if (name == "x5") return {[](std::span<const double> x) { return std::pow(x[0], 5); }, name};
  if (name == "cos")
    return {[](std::span<const double> x) {
              double a = 0.0;
              for (double v : x) a += v;
              return std::cos(3.0 * a);
            },
            name};
  if (name == "runge")
    return {[](std::span<const double> x) {
              double a = 0.0;
              for (double v : x) a += v * v;
              return 1.0 / (1.0 + 25.0 * a);
            },
            name};
  if (name.rfind("legendre:", 0) == 0) {
    const std::size_t k = std::stoul(name.substr(9));
    // Smallest basis that holds index k.
    std::size_t m = 0;
    while (legendre::LegendreBasis(s, m).size() <= k) ++m;
    auto basis = std::make_shared<const legendre::LegendreBasis>(s, m);
    return {[basis, k](std::span<const double> x) { return basis->eval(k, x); }, name};
  }
  throw std::invalid_argument("unknown input '" + name +
                              "' (zero, one, abs, x5, cos, runge, legendre:<k>, csv:<path>)");
}

// Samples x_1..x_s,value on a tensor grid, interpolated multilinearly
// ("linear") or by the nearest sample ("nearest").
InputFunction csv_input(const std::string& path, const std::string& rule, std::size_t s) {
  auto rows = numeric_rows(path);
  if (rows.empty()) throw std::runtime_error(path + ": no samples");
  std::vector<std::vector<double>> axes(s);
  for (const auto& r : rows) {
    if (r.size() != s + 1)
      throw std::runtime_error(path + ": expected " + std::to_string(s + 1) + " columns");
    for (std::size_t j = 0; j < s; ++j) axes[j].push_back(r[j]);
  }
  std::size_t total = 1;
  for (auto& a : axes) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    total *= a.size();
  }
  if (total != rows.size())
    throw std::runtime_error(path + ": samples do not form a full tensor grid");
  auto values = std::make_shared<std::vector<double>>(total);
  for (const auto& r : rows) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < s; ++j)
      flat = flat * axes[j].size() +
             static_cast<std::size_t>(std::lower_bound(axes[j].begin(), axes[j].end(), r[j]) -
                                      axes[j].begin());
    (*values)[flat] = r[s];
  }
  const bool nearest = rule == "nearest";
  if (!nearest && rule != "linear")
    throw std::invalid_argument("interpolation rule must be linear or nearest");
  auto ax = std::make_shared<std::vector<std::vector<double>>>(std::move(axes));
  return {[ax, values, nearest, s](std::span<const double> x) {
            // Per axis: bracketing index and weight of the upper sample.
            std::vector<std::size_t> lo(s);
            std::vector<double> w(s);
            for (std::size_t j = 0; j < s; ++j) {
              const auto& a = (*ax)[j];
              if (a.size() == 1) {
                lo[j] = 0;
                w[j] = 0.0;
                continue;
              }
              auto it = std::upper_bound(a.begin(), a.end(), x[j]);
              std::size_t i = it == a.begin() ? 0 : static_cast<std::size_t>(it - a.begin()) - 1;
              i = std::min(i, a.size() - 2);
              double f = (x[j] - a[i]) / (a[i + 1] - a[i]);
              f = std::clamp(f, 0.0, 1.0);
              if (nearest) f = f < 0.5 ? 0.0 : 1.0;
              lo[j] = i;
              w[j] = f;
            }
            double v = 0.0;
            for (std::size_t corner = 0; corner < (std::size_t{1} << s); ++corner) {
              double weight = 1.0;
              std::size_t flat = 0;
              for (std::size_t j = 0; j < s; ++j) {
                const bool up = (corner >> (s - 1 - j)) & 1;
                weight *= up ? w[j] : 1.0 - w[j];
                flat = flat * (*ax)[j].size() + lo[j] + (up && (*ax)[j].size() > 1 ? 1 : 0);
              }
              if (weight != 0.0) v += weight * (*values)[flat];
            }
            return v;
          },
          "csv:" + path};
}

InputFunction input_from_spec(const std::string& spec, const std::string& rule, std::size_t s) {
  if (spec.rfind("csv:", 0) == 0) return csv_input(spec.substr(4), rule, s);
  if (std::filesystem::exists(spec)) return csv_input(spec, rule, s);
  return builtin_input(spec, s);
}

std::vector<int> parse_only(const std::string& list) {
  std::vector<int> ids;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) ids.push_back(std::stoi(item));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit ReLU networks for functionals: construction, discretization, "
               "rate experiments"};
  app.require_subcommand(1);

  std::string out;

  std::size_t d = 2;
  auto* build_min = app.add_subcommand("build-min", "min(x_1..x_d) network");
  build_min->add_option("--d", d, "number of inputs (>= 2)")->required();
  build_min->add_option("--out", out, "write the network here instead of stdout");

  std::size_t t = 1;
  auto* build_spike = app.add_subcommand("build-spike", "spike function network");
  build_spike->add_option("--t", t, "input dimension (>= 1)")->required();
  build_spike->add_option("--out", out, "write the network here instead of stdout");

  std::size_t N = 4;
  double R = 1.0;
  std::string values = "norm";
  std::uint64_t seed = 1;
  std::size_t node_cap = kDefaultNodeCap;
  auto* build_interp = app.add_subcommand("build-interp", "grid interpolation network");
  build_interp->add_option("--t", t, "input dimension")->required();
  build_interp->add_option("--N", N, "grid intervals per axis")->required();
  build_interp->add_option("--R", R, "cube half-width")->required();
  build_interp->add_option("--values", values,
                           "CSV of node index -> value, or norm|ones|zeros|affine|random");
  build_interp->add_option("--seed", seed, "seed for --values random");
  build_interp->add_option("--node-cap", node_cap, "maximum grid nodes");
  build_interp->add_option("--out", out, "write the network here instead of stdout");

  std::size_t s = 1, m = 1, nodes = 0;
  double p = 2.0, C_K = 0.0, c1 = 1.0;
  std::string filter = "dlvp", input, rule = "linear";
  auto* disc = app.add_subcommand("discretize", "Legendre coefficients of V_m f");
  disc->add_option("--s", s, "input dimension");
  disc->add_option("--m", m, "degree parameter")->required();
  disc->add_option("--p", p, "L^p exponent (radius and projection error)");
  disc->add_option("--filter", filter, "dlvp or truncate")
      ->check(CLI::IsMember({"dlvp", "truncate"}));
  disc->add_option("--input", input,
                   "zero|one|abs|x5|cos|runge|legendre:<k>, or csv:<path> of x_1..x_s,value")
      ->required();
  disc->add_option("--interp", rule, "CSV interpolation rule: linear or nearest");
  disc->add_option("--nodes", nodes, "Gauss nodes per axis (0 = default)");
  disc->add_option("--C-K", C_K, "class bound; enables the [-R, R]^t check when > 0");
  disc->add_option("--c1", c1, "norm-comparison constant for R");

  std::string config, out_dir = ".";
  auto* run = app.add_subcommand("run", "rate experiment from a JSON config");
  run->add_option("--config", config, "experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "directory for report.csv and summary.json");

  std::string only;
  auto* ver = app.add_subcommand("verify", "run the acceptance suite; nonzero exit on failure");
  ver->add_option("--only", only, "comma-separated criterion ids");

  std::size_t lattice = 81;
  double extent = 2.0;
  auto* dump_spike = app.add_subcommand("dump-spike", "spike values on a t=2 lattice as CSV");
  dump_spike->add_option("--points", lattice, "lattice points per axis");
  dump_spike->add_option("--extent", extent, "lattice covers [-extent, extent]^2");
  dump_spike->add_option("--out", out, "CSV path (stdout when omitted)");

  std::size_t q = 8, panels = 1;
  auto* dump_quad = app.add_subcommand("dump-quadrature", "composite Gauss-Legendre rule as CSV");
  dump_quad->add_option("--q", q, "Gauss points per panel and axis");
  dump_quad->add_option("--panels", panels, "panels per axis");
  dump_quad->add_option("--s", s, "dimension");
  dump_quad->add_option("--out", out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  auto open_out = [&](std::ofstream& file) -> std::ostream& {
    if (out.empty()) return std::cout;
    file.open(out);
    if (!file) throw std::runtime_error("cannot write " + out);
    return file;
  };

  try {
    if (*build_min) {
      const auto t0 = Clock::now();
      auto net = build_min_net(d);
      emit_network(net, out, ms_since(t0));
    } else if (*build_spike) {
      const auto t0 = Clock::now();
      auto net = build_spike_net(t);
      emit_network(net, out, ms_since(t0));
    } else if (*build_interp) {
      const auto t0 = Clock::now();
      const simplicial::ScaledGrid grid(t, R, N);
      const auto spec = node_values_from(grid, values, seed, node_cap);
      auto net = build_interpolation_net(spec, node_cap);
      const double ms = ms_since(t0);
      std::ostringstream extra;
      extra << " nodes=" << grid.node_count()
            << " M/(t^4(N+1)^t)=" << weight_constant(net.count_nonzero(), t, N);
      emit_network(net, out, ms, extra.str());
    } else if (*disc) {
      const DiscretizationOperator op(s, m, parse_filter_kind(filter), nodes);
      const auto f = input_from_spec(input, rule, s);
      const RadiusSpec radius{m, s, p, C_K, c1};
      const auto nu = op.discretize(f, C_K > 0.0 ? &radius : nullptr);
      Json j;
      j["s"] = s;
      j["m"] = m;
      j["p"] = p;
      j["filter"] = filter;
      j["input"] = f.tag;
      j["t"] = op.t();
      j["nodes_per_axis"] = op.nodes_per_axis();
      if (C_K > 0.0) j["R"] = radius.R();
      const double change = op.refinement_change(f);
      j["refinement_change"] = change;
      j["projection_error"] = projection_error(f, s, m, p);
      Json idx = Json::array();
      for (std::size_t k = 0; k < op.t(); ++k) idx.push_back(op.basis().multi_index(k));
      j["multi_indices"] = std::move(idx);
      j["nu"] = nu;
      std::cout << j.dump(2) << '\n';
      if (change > kRefinementTolerance)
        std::cerr << "warning: coefficients changed by " << change
                  << " under node doubling; raise --nodes\n";
    } else if (*run) {
      const auto cfg = ExperimentConfig::load(config);
      const auto report = run_rate_experiment(cfg);
      std::filesystem::create_directories(out_dir);
      std::ofstream(out_dir + "/report.csv") << report.csv();
      std::ofstream(out_dir + "/summary.json") << report.summary_json() << '\n';
      std::cout << report.summary_json() << '\n';
      std::cerr << "wrote " << out_dir << "/report.csv and " << out_dir << "/summary.json\n";
    } else if (*ver) {
      const auto ids = parse_only(only);
      const auto results = verify::run_all(std::cout, ids);
      const bool ok = std::all_of(results.begin(), results.end(),
                                  [](const auto& r) { return r.passed; });
      std::cout << (ok ? "verify: all criteria passed" : "verify: FAILED") << '\n';
      return ok ? 0 : 1;
    } else if (*dump_spike) {
      if (lattice < 2) throw std::invalid_argument("--points must be >= 2");
      std::ofstream file;
      std::ostream& os = open_out(file);
      os << "y1,y2,psi\n" << std::setprecision(17);
      std::vector<double> y(2);
      for (std::size_t a = 0; a < lattice; ++a)
        for (std::size_t b = 0; b < lattice; ++b) {
          y[0] = -extent + 2.0 * extent * static_cast<double>(a) / static_cast<double>(lattice - 1);
          y[1] = -extent + 2.0 * extent * static_cast<double>(b) / static_cast<double>(lattice - 1);
          os << y[0] << ',' << y[1] << ',' << simplicial::spike(y) << '\n';
        }
    } else if (*dump_quad) {
      const auto r = legendre::composite_gauss_rule(q, panels, s);
      std::ofstream file;
      std::ostream& os = open_out(file);
      os << "i";
      for (std::size_t j = 0; j < s; ++j) os << ",x" << j + 1;
      os << ",weight\n" << std::setprecision(17);
      for (std::size_t i = 0; i < r.size(); ++i) {
        os << i;
        for (double x : r.point(i)) os << ',' << x;
        os << ',' << r.weights[i] << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

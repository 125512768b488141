// command-line front end: every module behind one binary with JSON reports
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccn/bifclass.hpp"
#include "ccn/decomp.hpp"
#include "ccn/dot.hpp"
#include "ccn/error.hpp"
#include "ccn/feedforward.hpp"
#include "ccn/linmaps.hpp"
#include "ccn/monoid.hpp"
#include "ccn/network.hpp"
#include "ccn/numerics.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace ccn;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json configs_json(const std::vector<KernelConfig>& configs) {
  json out = json::array();
  for (const auto& c : configs) {
    json copies = json::object();
    for (const auto& [cls, n] : c.copies) copies[std::to_string(cls)] = n;
    out.push_back({{"copies", std::move(copies)},
                   {"kernel_count", c.kernel_count},
                   {"center_count", c.center_count}});
  }
  return out;
}

json decomposition_json(const Decomposition& dec, bool with_bases) {
  json comps = json::array();
  for (const auto& c : dec.components) {
    json cj = {{"dim", c.dim},
               {"type", std::string(1, c.type_tag)},
               {"iso_class", c.iso_class}};
    if (with_bases) cj["basis"] = matrix_json(c.basis);
    comps.push_back(std::move(cj));
  }
  json mult = json::object();
  for (const auto& [cls, n] : dec.multiplicities) mult[std::to_string(cls)] = n;
  return {{"internal_dim", dec.internal_dim},
          {"components", std::move(comps)},
          {"multiplicities", std::move(mult)}};
}

struct Ctx {
  std::string command;
  std::string path;
  std::uint64_t seed = 1;
  bool deterministic = false;
  json result;
  std::vector<json> diagnostics;
};

int emit(const Ctx& ctx, int code) {
  json report;
  report["command"] = ctx.command;
  report["version"] = kVersion;
  if (!ctx.path.empty()) {
    std::string bytes;
    try {
      bytes = read_file(ctx.path);
    } catch (const Error&) {
    }
    report["input"] = {{"path", ctx.path}, {"fnv1a64", fnv1a64(bytes)}};
  }
  report["seed"] = ctx.seed;
  if (!ctx.deterministic) report["timestamp"] = timestamp();
  if (!ctx.result.is_null()) report["result"] = ctx.result;
  report["diagnostics"] = ctx.diagnostics;
  std::printf("%s\n", report.dump(2).c_str());
  return code;
}

int domain_error(Ctx& ctx, const std::string& kind, const std::string& message) {
  ctx.diagnostics.push_back({{"kind", kind}, {"message", message}});
  return emit(ctx, 1);
}

NetworkDoc load(const Ctx& ctx) { return parse_network(read_file(ctx.path)); }

MonoidTable load_closure(const Ctx& ctx) {
  return monoid_closure(load(ctx).network);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("FileNotFound", "cannot write " + path);
  out << text;
}

json closure_json(const MonoidTable& tab) {
  json gens = json::array();
  for (int g : tab.generators) gens.push_back(g);
  return {{"elements", tab.elements}, {"compose", tab.compose},
          {"generators", std::move(gens)}};
}

// decomposition at internal dimension d with class ids stable across d:
// decompose once at d=1, lift
Decomposition decomposition_at(const MonoidTable& tab, int d,
                               std::uint64_t seed) {
  Decomposition dec1 = decompose_representation(tab, 1, seed);
  return d == 1 ? dec1 : lift_decomposition(dec1, d);
}

json fit_json(const ExponentFit& fit, const std::vector<std::string>& names) {
  json out = json::array();
  for (size_t t = 0; t < fit.cells.size(); ++t) {
    const CellFit& c = fit.cells[t];
    out.push_back({{"cell", names[t]},
                   {"exponent", c.exponent},
                   {"coefficient", c.coefficient},
                   {"r2", c.r2},
                   {"classified", c.classified},
                   {"dyadic", c.dyadic}});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled cell networks over finite monoids"};
  app.require_subcommand(1);
  app.fallthrough();
  Ctx ctx;
  if (const char* env = std::getenv("CCN_SEED")) ctx.seed = std::strtoull(env, nullptr, 10);
  app.add_flag("--deterministic", ctx.deterministic,
               "suppress the timestamp for byte-identical reports");

  std::string dot_path, csv_path, kind = "steady", side = "+";
  int internal_dim = 1, params = 1, critical = 0, root_index = 0, points = 24;
  double lambda_min = 1e-8, lambda_max = 1e-3;
  int verify_seeds = 5;

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("network", ctx.path, "network JSON file")->required();
    sub->add_option("--seed", ctx.seed, "PRNG seed (default: CCN_SEED or 1)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the network invariants");
  add_input(validate);
  CLI::App* closure = app.add_subcommand("closure", "multiplication table of the input-map monoid");
  add_input(closure);
  CLI::App* fundamental = app.add_subcommand("fundamental", "left Cayley graph as a network");
  add_input(fundamental);
  fundamental->add_option("--dot", dot_path, "also write a GraphViz drawing");
  CLI::App* decompose = app.add_subcommand("decompose", "indecomposable subrepresentations");
  add_input(decompose);
  decompose->add_option("--internal-dim", internal_dim, "cell phase space dimension")
      ->check(CLI::PositiveNumber);
  bool dump_matrices = false;
  decompose->add_flag("--dump-matrices", dump_matrices, "include component bases");
  CLI::App* bifurcations = app.add_subcommand("bifurcations", "generic kernel/center configurations");
  add_input(bifurcations);
  bifurcations->add_option("--params", params, "number of bifurcation parameters l");
  bifurcations->add_option("--internal-dim", internal_dim, "cell phase space dimension")
      ->check(CLI::PositiveNumber);
  bifurcations->add_option("--kind", kind, "steady | hopf")
      ->check(CLI::IsMember({"steady", "hopf"}));
  CLI::App* feedforward = app.add_subcommand("feedforward", "order, loop types and amplification exponents");
  add_input(feedforward);
  feedforward->add_option("--critical-class", critical, "loop-type class index");
  feedforward->add_option("--root", root_index, "root subnetwork index (size order)");
  feedforward->add_option("--dot", dot_path, "drawing with mu annotations");
  CLI::App* simulate = app.add_subcommand("simulate", "continue one bifurcating branch");
  add_input(simulate);
  simulate->add_option("--internal-dim", internal_dim, "cell phase space dimension")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--critical-class", critical, "loop-type class index");
  simulate->add_option("--side", side, "branch side")->check(CLI::IsMember({"+", "-"}));
  simulate->add_option("--root", root_index, "root subnetwork index (size order)");
  simulate->add_option("--lambda-min", lambda_min, "smallest |lambda|");
  simulate->add_option("--lambda-max", lambda_max, "largest |lambda|");
  simulate->add_option("--points", points, "grid points");
  simulate->add_option("--csv", csv_path, "per-cell norms for external plotting");
  CLI::App* verify = app.add_subcommand("verify", "invariant battery with pass/fail matrix");
  add_input(verify);
  verify->add_option("--internal-dim", internal_dim, "cell phase space dimension")
      ->check(CLI::PositiveNumber);
  verify->add_option("--seeds", verify_seeds, "random maps per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are exit 2
  }
  ctx.command = app.get_subcommands().front()->get_name();

  try {
    if (*validate) {
      NetworkDoc doc = load(ctx);
      auto diags = validate_asymmetric_inputs(doc.network);
      for (const auto& dg : diags)
        ctx.diagnostics.push_back({{"kind", dg.kind},
                                   {"cell", dg.cell},
                                   {"color", dg.color},
                                   {"message", dg.message}});
      ctx.result = {{"valid", diags.empty()}};
      return emit(ctx, diags.empty() ? 0 : 1);
    }

    if (*closure) {
      ctx.result = closure_json(load_closure(ctx));
      return emit(ctx, 0);
    }

    if (*fundamental) {
      MonoidTable tab = load_closure(ctx);
      Network fun = build_fundamental_network(tab);
      NetworkDoc doc;
      doc.network = fun;
      ctx.result = {{"network", json::parse(serialize_network(doc))},
                    {"elements", tab.elements}};
      if (!dot_path.empty()) write_text(dot_path, network_dot(fun));
      return emit(ctx, 0);
    }

    if (*decompose) {
      MonoidTable tab = load_closure(ctx);
      Decomposition dec = decompose_representation(tab, internal_dim, ctx.seed);
      ctx.result = decomposition_json(dec, dump_matrices);
      return emit(ctx, 0);
    }

    if (*bifurcations) {
      MonoidTable tab = load_closure(ctx);
      Decomposition dec = decomposition_at(tab, internal_dim, ctx.seed);
      std::vector<KernelConfig> configs =
          kind == "steady" ? enumerate_generic_kernels(dec, params)
                           : enumerate_generic_centers(dec, params, true);
      ctx.result = {{"params", params},
                    {"internal_dim", internal_dim},
                    {"kind", kind},
                    {"classes",
                     [&] {
                       json cls = json::array();
                       for (const auto& s : class_summary(dec))
                         cls.push_back({{"iso_class", s.iso_class},
                                        {"dim", s.dim},
                                        {"type", std::string(1, s.type)},
                                        {"count", s.count}});
                       return cls;
                     }()},
                    {"configs", configs_json(configs)}};
      return emit(ctx, 0);
    }

    if (*feedforward) {
      MonoidTable tab = load_closure(ctx);
      FeedforwardOrder ord = feedforward_order(tab);
      if (!ord.is_feedforward)
        return domain_error(ctx, "NotFeedforward", "not feedforward");
      LoopTypeTable lt = loop_types(tab);
      auto roots = root_subnetworks(tab, ord);
      if (root_index < 0 || root_index >= static_cast<int>(roots.size()))
        return domain_error(ctx, "BadRootIndex",
                            "only " + std::to_string(roots.size()) +
                                " root subnetworks");
      BranchPrediction pred =
          mu_orders(tab, ord, lt, critical, roots[root_index]);
      json mu = json::object(), expo = json::object();
      for (int s = 0; s < tab.size(); ++s) {
        mu[tab.elements[s]] = pred.mu[s];
        expo[tab.elements[s]] = pred.exponent[s];
      }
      json order = json::array();
      for (int s : ord.topo_order) order.push_back(tab.elements[s]);
      json maximal = json::array();
      for (int s : ord.maximal_cells) maximal.push_back(tab.elements[s]);
      json classes = json::array();
      for (const auto& cls : lt.classes) {
        json members = json::array();
        for (int s : cls) members.push_back(tab.elements[s]);
        classes.push_back(std::move(members));
      }
      json rj = json::array();
      for (const auto& r : roots) {
        json cells = json::array();
        for (int s : r) cells.push_back(tab.elements[s]);
        rj.push_back(std::move(cells));
      }
      ctx.result = {{"is_feedforward", true},
                    {"order", std::move(order)},
                    {"maximal_cells", std::move(maximal)},
                    {"loop_types", std::move(classes)},
                    {"critical_class", critical},
                    {"root_subnetworks", std::move(rj)},
                    {"root", root_index},
                    {"mu", std::move(mu)},
                    {"exponents", std::move(expo)},
                    {"maximal_critical", pred.maximal_critical}};
      if (!dot_path.empty()) {
        std::vector<std::string> notes;
        for (int s = 0; s < tab.size(); ++s)
          notes.push_back("mu=" + std::to_string(pred.mu[s]));
        write_text(dot_path,
                   network_dot(build_fundamental_network(tab), notes));
      }
      return emit(ctx, 0);
    }

    if (*simulate) {
      MonoidTable tab = load_closure(ctx);
      FeedforwardOrder ord = feedforward_order(tab);
      if (!ord.is_feedforward)
        return domain_error(ctx, "NotFeedforward", "not feedforward");
      LoopTypeTable lt = loop_types(tab);
      auto roots = root_subnetworks(tab, ord);
      if (root_index < 0 || root_index >= static_cast<int>(roots.size()))
        return domain_error(ctx, "BadRootIndex",
                            "only " + std::to_string(roots.size()) +
                                " root subnetworks");
      BranchPrediction pred =
          mu_orders(tab, ord, lt, critical, roots[root_index]);
      AdmissibleField field =
          build_admissible_field(tab, internal_dim, 1, ctx.seed,
                                 Constraints{{critical}});
      ContinuationResult run = continue_branch(
          tab, field, pred, side == "+" ? +1 : -1, lambda_min, lambda_max,
          points);
      json samples = json::array();
      for (const auto& s : run.samples) {
        json state = json::array();
        for (int i = 0; i < s.state.size(); ++i) state.push_back(s.state(i));
        samples.push_back({{"lambda", s.lambda},
                           {"state", std::move(state)},
                           {"residual", s.residual},
                           {"newton_iters", s.newton_iters}});
      }
      json prediction = json::object();
      for (const auto& b : predict_branches(pred))
        prediction[tab.elements[b.cell]] = {{"exponent", b.exponent},
                                            {"two_sided", b.two_sided}};
      json verdict;
      if (run.samples.size() >= 12) {
        ExponentFit fit =
            estimate_exponents(run.samples, tab.size(), internal_dim);
        bool pass = true;
        for (int t = 0; t < tab.size(); ++t) {
          double target = pred.exponent[t];
          if (lt.class_of[t] == critical)
            pass = pass && std::abs(fit.cells[t].exponent - target) <= 0.05 &&
                   fit.cells[t].r2 >= 0.999;
          else
            pass = pass && fit.cells[t].exponent >= target - 0.05;
        }
        ctx.result = {{"prediction", std::move(prediction)},
                      {"samples", std::move(samples)},
                      {"fits", fit_json(fit, tab.elements)},
                      {"verdict", pass ? "match" : "mismatch"}};
      } else {
        ctx.result = {{"prediction", std::move(prediction)},
                      {"samples", std::move(samples)},
                      {"fits", json::array()},
                      {"verdict", "no-branch"}};
      }
      if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "lambda";
        for (const auto& name : tab.elements) csv << "," << name;
        csv << "\n";
        char buf[32];
        for (const auto& s : run.samples) {
          std::snprintf(buf, sizeof buf, "%.17g", s.lambda);
          csv << buf;
          for (int t = 0; t < tab.size(); ++t) {
            std::snprintf(buf, sizeof buf, "%.17g",
                          s.state.segment(t * internal_dim, internal_dim)
                              .norm());
            csv << "," << buf;
          }
          csv << "\n";
        }
        write_text(csv_path, csv.str());
      }
      return emit(ctx, 0);
    }

    if (*verify) {
      NetworkDoc doc = load(ctx);
      MonoidTable tab = monoid_closure(doc.network);
      const int d = internal_dim;
      json matrix = json::array();
      bool all_pass = true;
      auto check = [&](const std::string& name, bool pass) {
        matrix.push_back({{"check", name}, {"pass", pass}});
        all_pass = all_pass && pass;
      };

      check("asymmetric-inputs", validate_asymmetric_inputs(doc.network).empty());

      bool adjacency_law = true;
      for (int s = 0; s < tab.size(); ++s)
        for (int t = 0; t < tab.size(); ++t)
          adjacency_law =
              adjacency_law &&
              (adjacency_matrix(tab, s) * adjacency_matrix(tab, t) -
               adjacency_matrix(tab, tab.compose[t][s]))
                      .norm() == 0.0;
      check("adjacency-product-law", adjacency_law);

      bool rep_law = true;
      for (int s = 0; s < tab.size(); ++s)
        for (int t = 0; t < tab.size(); ++t)
          rep_law = rep_law &&
                    (representation_map(tab, s) * representation_map(tab, t) -
                     representation_map(tab, tab.compose[s][t]))
                            .norm() == 0.0;
      check("representation-product-law", rep_law);

      size_t c1 = commutant_basis(tab, 1).size();
      check("commutant-d2-scaling",
            commutant_basis(tab, 2).size() == 4 * c1);

      Decomposition dec = decompose_representation(tab, d, ctx.seed);
      int total = 0;
      for (const auto& c : dec.components) total += c.dim;
      check("decomposition-dims-sum", total == tab.size() * d);
      bool invariant = true;
      for (const auto& c : dec.components)
        for (int s = 0; s < tab.size(); ++s) {
          Mat A = representation_map(tab, s, d);
          Mat img = A * c.basis;
          Mat residual = img - c.basis * (c.basis.transpose() * img);
          invariant = invariant && residual.norm() <= 1e-8 * (1.0 + img.norm());
        }
      check("decomposition-invariance", invariant);

      if (feedforward_order(tab).is_feedforward) {
        // class-block spectra only triangularize for feedforward monoids
        bool spectra = true;
        for (std::uint64_t k = 1;
             k <= static_cast<std::uint64_t>(verify_seeds); ++k)
          spectra =
              spectra &&
              spectrum_report(tab, random_linear_admissible(tab, d, k)).match;
        check("spectrum-block-prediction", spectra);
      }

      bool equivariant = true;
      {
        AdmissibleField field = build_admissible_field(tab, d, 1, ctx.seed);
        Rng rng(ctx.seed + 77);
        Vec lamv = Vec::Zero(1);
        lamv(0) = 1e-4;
        for (int k = 0; k < 20; ++k) {
          Vec v(tab.size() * d);
          for (int i = 0; i < v.size(); ++i) v(i) = rng.gauss();
          Vec base = field.gamma(tab, v, lamv);
          for (int s = 0; s < tab.size(); ++s) {
            Mat A = representation_map(tab, s, d);
            Vec moved = field.gamma(tab, A * v, lamv) - A * base;
            equivariant =
                equivariant && moved.norm() <= 1e-12 * (1.0 + base.norm());
          }
        }
      }
      check("field-equivariance", equivariant);

      bool synchrony = true;
      for (const auto& part : enumerate_balanced_partitions(tab)) {
        int r = 0;
        for (int c : part) r = std::max(r, c + 1);
        synchrony =
            synchrony && synchrony_basis(part, tab, d).cols() == r * d;
      }
      check("synchrony-dimension", synchrony);

      ctx.result = {{"internal_dim", d},
                    {"all_pass", all_pass},
                    {"matrix", std::move(matrix)}};
      return emit(ctx, all_pass ? 0 : 1);
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    std::string prefix = e.kind() + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    return domain_error(ctx, e.kind(), msg);
  } catch (const std::exception& e) {
    return domain_error(ctx, "InternalError", e.what());
  }
  return 2;
}

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "symdyn/entropy.hpp"
#include "symdyn/markers.hpp"
#include "symdyn/noninv.hpp"
#include "symdyn/partitions.hpp"
#include "symdyn/prediction.hpp"
#include "symdyn/systems.hpp"

using json = nlohmann::ordered_json;
using namespace symdyn;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

json manifest(const CLI::App& sub, std::uint64_t seed) {
  json m;
  m["tool"] = "symdyn";
  m["version"] = SYMDYN_VERSION;
  m["subcommand"] = sub.get_name();
  json params = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help" || opt->count() == 0) continue;
    auto results = opt->results();
    std::string key = opt->get_name();
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (opt->get_type_size() == 0) {
      params[key] = true;
    } else if (results.size() == 1) {
      params[key] = results.front();
    } else {
      params[key] = results;
    }
  }
  m["parameters"] = params;
  m["seed"] = seed;
  return m;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void csv_header(std::ostream& out, const json& m) { out << "# manifest " << m.dump() << "\n"; }

DiscreteWord read_word(const Alphabet& alphabet, const std::string& text) {
  if (alphabet.single_char()) return alphabet.encode(text);
  std::istringstream in(text);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return alphabet.encode(tokens);
}

std::optional<double> closed_form_entropy(const SystemSpec& spec, const LanguageOracle& oracle, std::string& method) {
  switch (spec.kind) {
    case SystemKind::full:
      method = "exact";
      return std::log(static_cast<double>(oracle.alphabet().size()));
    case SystemKind::periodic:
      method = "exact";
      return 0.0;
    case SystemKind::sft: {
      const auto& shift = dynamic_cast<const ForbiddenWordShift&>(oracle);
      method = "spectral";
      return sft_entropy_exact(shift.graph()).entropy;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic dynamics workbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SYMDYN_VERSION);
  std::uint64_t seed = 0;
  std::string out_path;
  app.add_option("--seed", seed, "Seed for randomized searches")->capture_default_str();
  app.add_option("-o,--out", out_path, "Write the report here instead of stdout");

  std::string spec_path;
  std::size_t cap = default_enumeration_cap();

  auto* lang = app.add_subcommand("lang", "List L_n of a system as CSV");
  std::size_t lang_n = 0;
  lang->add_option("--spec", spec_path)->required()->check(CLI::ExistingFile);
  lang->add_option("--n", lang_n)->required();
  lang->add_option("--cap", cap, "Enumeration cap")->capture_default_str();

  auto* ent = app.add_subcommand("entropy", "Complexity table and entropy estimate as CSV");
  std::size_t nmax = 12;
  bool bits = false;
  ent->add_option("--spec", spec_path)->required()->check(CLI::ExistingFile);
  ent->add_option("--nmax", nmax)->capture_default_str()->check(CLI::PositiveNumber);
  ent->add_option("--cap", cap, "Enumeration cap")->capture_default_str();
  ent->add_flag("--bits", bits, "Report slopes in bits instead of nats");

  auto* pred = app.add_subcommand("predict", "Past branching, predictor and forcing words as JSON");
  std::size_t m = 3, k = 1, max_length = 12;
  std::optional<std::string> predictor_for, forcing_for;
  pred->add_option("--spec", spec_path)->required()->check(CLI::ExistingFile);
  pred->add_option("--m", m)->capture_default_str();
  pred->add_option("--k", k)->capture_default_str();
  pred->add_option("--predictor", predictor_for, "Search b so that ba forces its next k symbols");
  pred->add_option("--forcing", forcing_for, "Search v whose occurrences are followed by this word");
  pred->add_option("--max-length", max_length, "Search depth")->capture_default_str();
  pred->add_option("--cap", cap, "Enumeration cap")->capture_default_str();

  auto* build = app.add_subcommand("noninv-build", "Stage records as CSV, stage words as a dyadic dump");
  std::size_t stages = 4;
  std::string dump_path;
  build->add_option("--spec", spec_path)->check(CLI::ExistingFile);
  build->add_option("--stages", stages)->capture_default_str();
  build->add_option("--dump", dump_path, "Write materializable stage words here");

  auto* analyze = app.add_subcommand("noninv-analyze", "Frequency, ratio and mixture report as JSON");
  std::vector<std::string> cylinder_text = {"[1/2,1]"};
  std::vector<std::size_t> ratio_stages = {0};
  std::vector<std::uint64_t> checkpoints;
  std::size_t mixture_stage = 0;
  analyze->add_option("--spec", spec_path)->check(CLI::ExistingFile);
  analyze->add_option("--cylinder", cylinder_text, "Intervals U_1 .. U_k")->capture_default_str();
  analyze->add_option("--stages", ratio_stages, "Stages s for the ratio check")->capture_default_str();
  analyze->add_option("--checkpoints", checkpoints, "Extra m values for p(m)");
  analyze->add_option("--mixture-stage", mixture_stage, "Stage n for the mixture statistic")->capture_default_str();

  auto* part = app.add_subcommand("partition", "Entropies and Rohlin distance from a CSV sample");
  std::string csv_path;
  part->add_option("--csv", csv_path, "Rows: point,mass,atomP,atomQ")->required()->check(CLI::ExistingFile);

  auto* mark = app.add_subcommand("markers", "Verify or search marker families");
  std::string sets_path;
  MarkerParams params;
  std::optional<unsigned> shift_bound;
  bool search = false;
  std::uint64_t budget = 1'000'000;
  mark->add_option("--sets", sets_path, "JSON array of index arrays")->check(CLI::ExistingFile);
  mark->add_option("--T", params.T)->required()->check(CLI::PositiveNumber);
  mark->add_option("--gap", params.gap)->capture_default_str();
  mark->add_option("--shift-bound", shift_bound, "Defaults to floor(9T/10)");
  mark->add_option("--delta", params.delta)->capture_default_str();
  mark->add_flag("--search", search, "Search for a family instead of verifying one");
  mark->add_option("--budget", budget, "Search node budget")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const CLI::App* sub = app.get_subcommands().front();
  try {
    Output output(out_path);
    std::ostream& out = output.stream();
    json man = manifest(*sub, seed);

    if (sub == lang) {
      auto doc = load_spec(spec_path);
      auto oracle = make_oracle(doc);
      auto words = oracle->words(lang_n, cap);
      csv_header(out, man);
      out << "word\n";
      for (const auto& w : words) out << csv_field(oracle->alphabet().render(w)) << "\n";
      if (oracle->sample_based()) out << "# sample-based: lower approximation of L_n\n";
    } else if (sub == ent) {
      auto doc = load_spec(spec_path);
      auto oracle = make_oracle(doc);
      auto table = complexity(*oracle, nmax, cap);
      double unit = bits ? std::log(2.0) : 1.0;
      csv_header(out, man);
      out << "n,p_n,slope\n";
      for (const auto& row : table.rows) out << row.n << "," << row.count << "," << num(row.slope / unit) << "\n";
      std::string method;
      if (auto h = closed_form_entropy(doc.main(), *oracle, method)) out << method << ",," << num(*h / unit) << "\n";
      if (table.rows.size() >= 4) out << "fit,," << num(entropy_estimate(table).fit_slope / unit) << "\n";
      if (table.truncated) out << "# truncated: " << table.note << "\n";
      if (table.sample_based) out << "# sample-based: lower approximation\n";
    } else if (sub == pred) {
      auto doc = load_spec(spec_path);
      auto oracle = make_oracle(doc);
      const auto& alphabet = oracle->alphabet();
      json report;
      report["manifest"] = man;
      if (predictor_for || forcing_for) {
        WordSearchResult r = predictor_for
                                 ? find_predictor_word(*oracle, read_word(alphabet, *predictor_for), k, max_length, cap)
                                 : find_forcing_word(*oracle, read_word(alphabet, *forcing_for), max_length, cap);
        report["found"] = r.word.has_value();
        report["word"] = r.word ? json(alphabet.render(*r.word)) : json(nullptr);
        report["forced"] = alphabet.render(r.forced);
        report["horizon"] = r.horizon;
        report["candidates"] = r.candidates;
        report["sample_based"] = r.sample_based;
        if (!r.note.empty()) report["note"] = r.note;
      } else {
        auto profile = past_branching(*oracle, m, k, cap);
        report["max_extensions"] = profile.max_extensions;
        report["witness"] = alphabet.render(profile.argmax_past);
        json hist = json::object();
        for (auto [count, pasts] : profile.histogram) hist[std::to_string(count)] = pasts;
        report["histogram"] = hist;
        report["horizon"] = m + k;
        report["sample_based"] = profile.sample_based;
      }
      out << report.dump(2) << "\n";
    } else if (sub == build) {
      ConstructionSchedule schedule;
      if (!spec_path.empty()) schedule = schedule_from_spec(load_spec(spec_path).main());
      NoninvGenerator gen(schedule);
      csv_header(out, man);
      out << "stage,length,depth,multiplicity,y_length,next_length,saturated,exact\n";
      for (std::size_t n = 0; n < stages; ++n) {
        auto r = gen.stage(n);
        out << r.stage << "," << r.length << "," << r.depth << "," << r.multiplicity << "," << r.y_length << ","
            << r.next_length << "," << r.saturated << "," << r.exact << "\n";
      }
      if (!dump_path.empty()) {
        std::ofstream dump(dump_path);
        if (!dump) throw std::runtime_error("cannot write '" + dump_path + "'");
        dump << "# manifest " << man.dump() << "\n";
        for (std::size_t n = 0; n < stages; ++n) {
          auto r = gen.stage(n);
          if (r.saturated || r.length > schedule.exact_cap) {
            dump << "# stage " << n << " has " << (r.saturated ? std::string("more than 2^64") : std::to_string(r.length))
                 << " symbols; above the exact cap of " << schedule.exact_cap << "\n";
            break;
          }
          dump << "# stage " << n << "\n" << format_word(Word(gen.stage_word(n))) << "\n";
        }
      }
    } else if (sub == analyze) {
      ConstructionSchedule schedule;
      if (!spec_path.empty()) schedule = schedule_from_spec(load_spec(spec_path).main());
      auto gen = std::make_shared<const NoninvGenerator>(schedule);
      CylinderSet cylinder;
      for (const auto& t : cylinder_text) cylinder.intervals.push_back(Interval::parse(t));

      json report;
      report["manifest"] = man;
      json cyl = json::array();
      for (const auto& iv : cylinder.intervals) cyl.push_back(iv.to_string());
      report["cylinder"] = cyl;

      json ratios = json::array();
      for (const auto& r : ratio_report(*gen, cylinder, ratio_stages)) {
        json j;
        j["stage"] = r.stage;
        j["hits_in_stage"] = r.hits_in_stage;
        j["p_stage"] = {{"m", r.at_stage.m}, {"hits", r.at_stage.hits}, {"p", r.at_stage.p}};
        j["p_next"] = {{"m", r.at_next.m}, {"hits", r.at_next.hits}, {"p", r.at_next.p}};
        j["skipped"] = r.skipped;
        if (!r.skipped) {
          j["alpha"] = r.alpha.get_str();
          j["ratio"] = r.ratio.get_str();
          j["beta"] = r.beta.get_str();
          j["holds"] = r.holds;
        }
        ratios.push_back(j);
      }
      report["ratios"] = ratios;

      if (!checkpoints.empty()) {
        std::uint64_t top = *std::max_element(checkpoints.begin(), checkpoints.end());
        auto stream = prefix_stream(gen, top + cylinder.dimension() - 1);
        json freq = json::array();
        for (const auto& p : cylinder_frequency(*stream, cylinder, checkpoints))
          freq.push_back({{"m", p.m}, {"hits", p.hits}, {"p", p.p}});
        report["frequency"] = freq;
      }

      auto next = gen->stage(mixture_stage + 1);
      if (!next.saturated && next.length <= kLazyBudget) {
        report["mixture"] = {{"stage", mixture_stage},
                             {"window", next.length},
                             {"lambda", mixture_statistic(*gen, 0, next.length, mixture_stage)}};
      }
      out << report.dump(2) << "\n";
    } else if (sub == part) {
      std::istringstream in(read_file(csv_path));
      std::vector<mpq_class> exact;
      std::vector<double> masses;
      std::vector<std::size_t> p_atoms, q_atoms;
      bool rational = true;
      std::size_t line_no = 0;
      for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
        if (cells.size() != 4) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 4 columns");
        if (line_no == 1 && cells[1] == "mass") continue;
        const std::string& mass = cells[1];
        if (mass.find_first_of(".eE") == std::string::npos) {
          mpq_class q(mass);
          q.canonicalize();
          exact.push_back(q);
          masses.push_back(q.get_d());
        } else {
          rational = false;
          masses.push_back(std::stod(mass));
        }
        p_atoms.push_back(std::stoull(cells[2]));
        q_atoms.push_back(std::stoull(cells[3]));
      }
      if (masses.empty()) throw std::invalid_argument("empty sample");
      std::shared_ptr<const WeightedSample> sample;
      if (rational) {
        sample = std::make_shared<const WeightedSample>(WeightedSample::from_rationals(exact));
      } else {
        sample = std::make_shared<const WeightedSample>(WeightedSample(masses));
      }
      Partition P(sample, p_atoms), Q(sample, q_atoms);
      csv_header(out, man);
      out << "quantity,value\n";
      out << "H(P)," << num(shannon_entropy(P)) << "\n";
      out << "H(Q)," << num(shannon_entropy(Q)) << "\n";
      out << "H(P|Q)," << num(conditional_entropy(P, Q)) << "\n";
      out << "d(P,Q)," << num(rohlin_distance(P, Q)) << "\n";
    } else if (sub == mark) {
      params.shift_bound = shift_bound.value_or(default_shift_bound(params.T));
      json report;
      report["manifest"] = man;
      if (search) {
        auto r = search_marker_family(params, budget);
        report["found"] = r.found;
        report["family"] = r.family;
        report["required"] = r.required;
        report["candidates"] = r.candidates;
        report["nodes"] = r.nodes;
        report["exhaustive"] = r.exhaustive;
        if (!r.note.empty()) report["note"] = r.note;
      } else {
        if (sets_path.empty()) throw UsageError("markers needs --sets or --search");
        json sets = json::parse(read_file(sets_path));
        MarkerFamily family = sets.get<MarkerFamily>();
        auto d = verify_marker_family(family, params);
        report["holds"] = d.holds;
        if (d.violation) {
          const auto& v = *d.violation;
          json j;
          j["condition"] = v.condition;
          if (v.a) j["A"] = *v.a;
          if (v.b) j["B"] = *v.b;
          if (v.k) j["k"] = *v.k;
          if (v.pair) j["pair"] = {v.pair->first, v.pair->second};
          j["message"] = v.describe();
          report["violation"] = j;
        }
      }
      out << report.dump(2) << "\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.diagnostic().to_string() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

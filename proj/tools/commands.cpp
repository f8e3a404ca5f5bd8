#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "vpralign/bundle.hpp"
#include "vpralign/evaluation.hpp"
#include "vpralign/parallel.hpp"
#include "vpralign/projection.hpp"
#include "vpralign/synthesis.hpp"
#include "vpralign/temporal.hpp"

namespace vpralign::cli {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Every number goes out with enough digits to read back the same double.
std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string bundle_line(const std::string& label, const std::string& path, const FeatureBundle& b) {
  std::ostringstream s;
  s << "# " << label << "=" << path << " frames=" << b.frames.size() << " W=" << b.frames.width()
    << " D=" << b.frames.dim() << " projected=" << (b.projected ? 1 : 0) << " seed=" << b.seed << "\n";
  return s.str();
}

std::string align_line(const AlignConfig& c) {
  std::ostringstream s;
  s << "# mode=" << to_string(c.mode) << " sigma=" << num(c.sigma) << " xi=" << c.xi
    << " restricted=" << (c.restricted ? 1 : 0) << " window_size=" << c.window_size << "\n";
  return s.str();
}

std::string retrieval_line(const RetrievalConfig& r) {
  std::ostringstream s;
  s << "# seq_len=" << r.seq_len << " beta=" << num(r.beta) << " k=" << r.window_length()
    << " threshold=" << num(r.threshold) << "\n";
  return s.str();
}

// Output is assembled in memory and written once the command has succeeded,
// so a failed run never leaves a partial file behind.
void commit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_sidecar(const std::string& bundle_path, const nlohmann::json& meta) {
  std::ofstream f(bundle_path + ".json");
  if (!f) throw std::runtime_error("cannot write " + bundle_path + ".json");
  f << meta.dump(2) << "\n";
}

nlohmann::json bundle_json(const FeatureBundle& b) {
  return {{"frames", b.frames.size()}, {"width", b.frames.width()}, {"dim", b.frames.dim()},
          {"projected", b.projected}, {"seed", b.seed}};
}

struct AlignFlags {
  std::string mode = "adaptive";
  double sigma = 1.0;
  std::size_t xi = 3;
  bool restricted = false;
  std::size_t window_size = 4;

  void add(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "adaptive | vanilla | holistic-cosine | sliding-window")
        ->capture_default_str();
    cmd->add_option("--sigma", sigma, "adaptive weight slope")->capture_default_str();
    cmd->add_option("--xi", xi, "band half-width for --restricted")->capture_default_str();
    cmd->add_flag("--restricted", restricted, "evaluate only cells with |i-j| < xi");
    cmd->add_option("--window-size", window_size, "sliding-window span")->capture_default_str();
  }
  AlignConfig config() const {
    AlignConfig c;
    c.mode = parse_align_mode(mode);
    c.sigma = sigma;
    c.xi = xi;
    c.restricted = restricted;
    c.window_size = window_size;
    return c;
  }
};

struct RetrievalFlags {
  std::size_t seq_len = 20;
  double beta = 2.0;
  double threshold = kInfinity;

  void add(CLI::App* cmd, bool with_threshold) {
    cmd->add_option("--seq-len", seq_len, "query sequence length l")->capture_default_str();
    cmd->add_option("--beta", beta, "window factor, k = ceil(beta * l)")->capture_default_str();
    if (with_threshold) cmd->add_option("--threshold", threshold, "report matches below this distance");
  }
  RetrievalConfig config() const {
    RetrievalConfig r;
    r.seq_len = seq_len;
    r.beta = beta;
    r.threshold = threshold;
    r.validate();
    return r;
  }
};

// --- synth -----------------------------------------------------------------

struct SynthOptions {
  SynthSpec spec;
  std::string out_dir = ".";
};

void add_synth(CLI::App& app, SynthOptions& o, std::function<void()>& action, std::ostream& out,
               std::ostream& err) {
  auto* cmd = app.add_subcommand("synth", "write synthetic reference/query bundles and ground truth");
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--frames", o.spec.n_frames, "reference frames")->capture_default_str();
  cmd->add_option("--width", o.spec.width, "local features per image (W)")->capture_default_str();
  cmd->add_option("--dim", o.spec.dim, "local feature dimension (D)")->capture_default_str();
  cmd->add_option("--shift", o.spec.shift, "positions the query view is shifted")->capture_default_str();
  cmd->add_option("--noise", o.spec.noise, "multiplicative appearance noise")->capture_default_str();
  cmd->add_option("--speed", o.spec.speed_ratio, "reference frames per query frame")->capture_default_str();
  cmd->add_option("--aliasing", o.spec.aliasing_pairs, "near-duplicate reference pairs")->capture_default_str();
  cmd->add_option("--spatial-correlation", o.spec.spatial_correlation)->capture_default_str();
  cmd->add_option("--seed", o.spec.seed, "generator seed")->capture_default_str();
  cmd->callback([&o, &action, &out, &err] {
    action = [&o, &out, &err] {
      const SynthData d = generate(o.spec);
      if (d.adjacent_distance < 0.1 || d.adjacent_distance > 0.3) {
        err << "warning: mean adjacent-frame distance " << d.adjacent_distance
            << " is outside [0.1, 0.3]\n";
      }
      fs::create_directories(o.out_dir);
      const FeatureBundle ref{d.reference, false, 0};
      const FeatureBundle qry{d.query, false, 0};
      const std::string ref_path = (fs::path(o.out_dir) / "reference.stab").string();
      const std::string qry_path = (fs::path(o.out_dir) / "query.stab").string();
      const std::string gt_path = (fs::path(o.out_dir) / "ground_truth.csv").string();

      std::ostringstream gt;
      gt << "# vpralign synth seed=" << o.spec.seed << "\n"
         << "# frames=" << o.spec.n_frames << " W=" << o.spec.width << " D=" << o.spec.dim
         << " shift=" << o.spec.shift << " noise=" << num(o.spec.noise) << " speed=" << num(o.spec.speed_ratio)
         << " aliasing=" << o.spec.aliasing_pairs << " spatial_correlation=" << num(o.spec.spatial_correlation)
         << "\n";
      write_ground_truth(gt, d.ground_truth);

      const nlohmann::json spec = {{"seed", o.spec.seed},
                                   {"frames", o.spec.n_frames},
                                   {"width", o.spec.width},
                                   {"dim", o.spec.dim},
                                   {"shift", o.spec.shift},
                                   {"noise", o.spec.noise},
                                   {"speed", o.spec.speed_ratio},
                                   {"aliasing", o.spec.aliasing_pairs},
                                   {"spatial_correlation", o.spec.spatial_correlation}};
      nlohmann::json aliases = nlohmann::json::array();
      for (const AliasPair& a : d.aliases) aliases.push_back({{"source", a.source}, {"overwritten", a.overwritten}});

      write_bundle(ref_path, ref);
      write_bundle(qry_path, qry);
      commit(gt_path, gt.str(), out);
      write_sidecar(ref_path, {{"command", "synth"}, {"role", "reference"}, {"spec", spec},
                               {"bundle", bundle_json(ref)}, {"aliases", aliases},
                               {"adjacent_distance", d.adjacent_distance}});
      write_sidecar(qry_path, {{"command", "synth"}, {"role", "query"}, {"spec", spec},
                               {"bundle", bundle_json(qry)}});
    };
  });
}

// --- project ---------------------------------------------------------------

struct ProjectOptions {
  std::string input, output;
  std::size_t target_dim = 512;
  std::uint64_t seed = 0;
};

void add_project(CLI::App& app, ProjectOptions& o, std::function<void()>& action) {
  auto* cmd = app.add_subcommand("project", "Gaussian random projection of a bundle");
  cmd->add_option("input", o.input, "unprojected bundle")->required();
  cmd->add_option("output", o.output, "projected bundle")->required();
  cmd->add_option("--target-dim", o.target_dim, "projected dimension")->capture_default_str();
  cmd->add_option("--seed", o.seed, "projection seed, stored in the output header")->capture_default_str();
  cmd->callback([&o, &action] {
    action = [&o] {
      const FeatureBundle in = read_bundle(o.input);
      if (in.projected) {
        throw ConfigError(o.input + " is already projected (seed " + std::to_string(in.seed) + ")");
      }
      ProjectionSpec spec;
      spec.source_dim = in.frames.dim();
      spec.target_dim = o.target_dim;
      spec.seed = o.seed;
      const FeatureBundle out{project(in.frames, spec), true, o.seed};
      write_bundle(o.output, out);
      write_sidecar(o.output, {{"command", "project"}, {"input", o.input}, {"source_dim", spec.source_dim},
                               {"target_dim", spec.target_dim}, {"seed", spec.seed},
                               {"bundle", bundle_json(out)}});
    };
  });
}

// --- match -----------------------------------------------------------------

struct MatchOptions {
  std::string reference, query, output;
  AlignFlags align;
  RetrievalFlags retrieval;
  std::size_t top_k = 1;
  std::optional<std::uint64_t> seed;
};

void add_match(CLI::App& app, MatchOptions& o, std::function<void()>& action, std::ostream& out) {
  auto* cmd = app.add_subcommand("match", "ranked sequence matches for every query window");
  cmd->add_option("reference", o.reference, "reference (history) bundle")->required();
  cmd->add_option("query", o.query, "query bundle")->required();
  cmd->add_option("-o,--output", o.output, "report path, stdout when omitted");
  o.align.add(cmd);
  o.retrieval.add(cmd, true);
  cmd->add_option("--top-k", o.top_k, "matches reported per window")->capture_default_str();
  cmd->add_option("--seed", o.seed, "projection seed both bundles must carry");
  cmd->callback([&o, &action, &out] {
    action = [&o, &out] {
      const FeatureBundle ref = read_bundle(o.reference);
      const FeatureBundle qry = read_bundle(o.query);
      require_compatible(ref, qry);
      if (o.seed) {
        for (const FeatureBundle* b : {&ref, &qry}) {
          if (!b->projected || b->seed != *o.seed) {
            throw SeedMismatchError("expected projection seed " + std::to_string(*o.seed) + ", bundle has " +
                                    (b->projected ? std::to_string(b->seed) : std::string("none")));
          }
        }
      }
      if (o.top_k == 0) throw ConfigError("--top-k must be at least 1");
      const AlignConfig acfg = o.align.config();
      acfg.validate(ref.frames.width());
      const RetrievalConfig rcfg = o.retrieval.config();
      const std::size_t l = rcfg.seq_len;
      if (qry.frames.size() < l) throw ConfigError("query has fewer frames than --seq-len");

      // One grid for the whole run; each window is a row block of it.
      const DistanceMatrix grid = image_distance_matrix(qry.frames, ref.frames, acfg);

      std::ostringstream s;
      s << "# vpralign match\n"
        << bundle_line("reference", o.reference, ref) << bundle_line("query", o.query, qry) << align_line(acfg)
        << retrieval_line(rcfg) << "# top_k=" << o.top_k << "\n"
        << "first_query,rank,start,length,distance\n";
      for (std::size_t q0 = 0; q0 + l <= qry.frames.size(); ++q0) {
        const SearchResult r = search(grid.view().row_block(q0, l), rcfg);
        std::size_t rank = 0;
        for (const SequenceMatch& m : r.matches) {
          if (rank == o.top_k || !(m.distance < rcfg.threshold)) break;
          s << q0 << "," << rank << "," << m.start << "," << m.length << "," << num(m.distance)
            << "\n";
          ++rank;
        }
      }
      commit(o.output, s.str(), out);
    };
  });
}

// --- eval ------------------------------------------------------------------

struct EvalOptions {
  std::string reference, query, truth, curve_path, summary_path;
  AlignFlags align;
  RetrievalFlags retrieval;
  std::string temporal = "sequence";
  bool ablation = false;
  std::int64_t tolerance = 3;
  std::optional<std::uint64_t> seed;
};

const char* kCompensationNote =
    "# boundary compensation (repo convention): the first and last floor(l/2) query frames take the "
    "reference frame the first/last window's matched path aligns them to, with that window's distance\n";

void add_eval(CLI::App& app, EvalOptions& o, std::function<void()>& action, std::ostream& out,
              std::ostream& err) {
  auto* cmd = app.add_subcommand("eval", "precision/recall sweep against a ground-truth table");
  cmd->add_option("reference", o.reference, "reference bundle")->required();
  cmd->add_option("query", o.query, "query bundle")->required();
  cmd->add_option("ground_truth", o.truth, "ground-truth table")->required();
  o.align.add(cmd);
  o.retrieval.add(cmd, false);
  cmd->add_option("--temporal", o.temporal, "single | sequence")->capture_default_str();
  cmd->add_flag("--ablation", o.ablation, "every image mode crossed with both temporal modes");
  cmd->add_option("--tolerance", o.tolerance, "frames")->capture_default_str();
  cmd->add_option("--curve", o.curve_path, "PR curve table path");
  cmd->add_option("-o,--output", o.summary_path, "max-F1 table path, stdout when omitted");
  cmd->add_option("--seed", o.seed, "projection seed both bundles must carry");
  cmd->callback([&o, &action, &out, &err] {
    action = [&o, &out, &err] {
      const FeatureBundle ref = read_bundle(o.reference);
      const FeatureBundle qry = read_bundle(o.query);
      require_compatible(ref, qry);
      if (o.seed) {
        for (const FeatureBundle* b : {&ref, &qry}) {
          if (!b->projected || b->seed != *o.seed) {
            throw SeedMismatchError("expected projection seed " + std::to_string(*o.seed));
          }
        }
      }
      const std::vector<std::int64_t> truth = read_ground_truth(o.truth);
      if (truth.size() > qry.frames.size()) throw ShapeError("ground truth has more rows than query frames");
      if (o.tolerance < 0) throw ConfigError("--tolerance must be non-negative");

      PipelineConfig base;
      base.image = o.align.config();
      base.image.validate(ref.frames.width());
      base.retrieval = o.retrieval.config();
      base.temporal = parse_temporal_mode(o.temporal);
      EvalProtocol protocol;
      protocol.tolerance = o.tolerance;

      std::vector<AblationEntry> entries;
      if (o.ablation) {
        entries = run_ablation(ref.frames, qry.frames, truth, base, protocol);
      } else {
        const RunResult run = run_pipeline(ref.frames, qry.frames, base);
        if (base.temporal == TemporalMode::sequence && run.window_matches.empty()) {
          err << "warning: fewer query frames than --seq-len, boundary compensation skipped\n";
        }
        AblationEntry e;
        e.image_mode = base.image.mode;
        e.temporal = base.temporal;
        e.curve = evaluate(run, truth, protocol);
        e.max_f1 = e.curve.max_f1();
        entries.push_back(std::move(e));
      }
      const std::size_t excluded = entries.front().curve.excluded;
      if (excluded > 0) err << "excluded " << excluded << " query frames without ground truth\n";

      std::ostringstream header;
      header << bundle_line("reference", o.reference, ref) << bundle_line("query", o.query, qry)
             << "# ground_truth=" << o.truth << " rows=" << truth.size() << " excluded=" << excluded << "\n"
             << align_line(base.image) << retrieval_line(base.retrieval) << "# tolerance=" << o.tolerance
             << " temporal=" << (o.ablation ? std::string("all") : std::string(to_string(base.temporal)))
             << "\n"
             << kCompensationNote;

      std::ostringstream summary;
      summary << "# vpralign eval\n"
              << header.str() << "image_mode,temporal,max_f1,threshold,precision,recall,tp,fp,fn,tn\n";
      std::ostringstream curve;
      curve << "# vpralign eval curve\n"
            << header.str() << "image_mode,temporal,threshold,precision,recall,f1,tp,fp,fn,tn\n";
      for (const AblationEntry& e : entries) {
        const PrPoint& b = e.curve.best_point();
        summary << to_string(e.image_mode) << "," << to_string(e.temporal) << "," << num(e.max_f1) << ","
                << num(b.threshold) << "," << num(b.precision) << "," << num(b.recall) << "," << b.tp << ","
                << b.fp << "," << b.fn << "," << b.tn << "\n";
        for (const PrPoint& p : e.curve.points) {
          curve << to_string(e.image_mode) << "," << to_string(e.temporal) << "," << num(p.threshold) << ","
                << num(p.precision) << "," << num(p.recall) << "," << num(p.f1) << "," << p.tp << "," << p.fp
                << "," << p.fn << "," << p.tn << "\n";
        }
      }
      if (!o.curve_path.empty()) commit(o.curve_path, curve.str(), out);
      commit(o.summary_path, summary.str(), out);
    };
  });
}

// --- bench -----------------------------------------------------------------

struct BenchOptions {
  std::vector<std::size_t> sizes{1000, 2000};
  std::size_t seq_len = 20;
  double beta = 2.0;
  std::size_t reps = 5;
  std::size_t dim = 10416;
  std::size_t target_dim = 512;
  std::size_t xi = 3;
  std::uint64_t seed = 0;
  std::string output;
};

std::string secs(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void add_bench(CLI::App& app, BenchOptions& o, std::function<void()>& action, std::ostream& out,
               std::ostream& err) {
  auto* cmd = app.add_subcommand("bench", "D_CH and retrieval timings for original, GRP and GRP+RA");
  cmd->add_option("--sizes", o.sizes, "history lengths n")->delimiter(',')->capture_default_str();
  cmd->add_option("--seq-len", o.seq_len, "query sequence length l")->capture_default_str();
  cmd->add_option("--beta", o.beta, "window factor")->capture_default_str();
  cmd->add_option("--reps", o.reps, "repetitions, the minimum time is reported")->capture_default_str();
  cmd->add_option("--dim", o.dim, "synthetic feature dimension")->capture_default_str();
  cmd->add_option("--target-dim", o.target_dim, "GRP dimension")->capture_default_str();
  cmd->add_option("--xi", o.xi, "RA band half-width")->capture_default_str();
  cmd->add_option("--seed", o.seed, "generator and projection seed")->capture_default_str();
  cmd->add_option("-o,--output", o.output, "table path, stdout when omitted");
  cmd->callback([&o, &action, &out, &err] {
    action = [&o, &out, &err] {
      if (o.reps == 0) throw ConfigError("--reps must be at least 1");
      RetrievalConfig rcfg;
      rcfg.seq_len = o.seq_len;
      rcfg.beta = o.beta;
      rcfg.validate();

      std::ostringstream s;
      s << "# vpralign bench seed=" << o.seed << " dim=" << o.dim << " target_dim=" << o.target_dim
        << " xi=" << o.xi << " reps=" << o.reps << " workers=" << worker_count() << "\n"
        << retrieval_line(rcfg) << "# times are the minimum over repetitions; projection is preprocessing and "
        << "is timed separately\n"
        << "n,config,dim,restricted,dch_seconds,retrieval_seconds,projection_seconds,dp_cell_updates\n";
      for (std::size_t n : o.sizes) {
        SynthSpec spec;
        spec.n_frames = n;
        spec.dim = o.dim;
        spec.seed = o.seed;
        const SynthData d = generate(spec);
        if (n < o.seq_len) throw ConfigError("bench size below --seq-len");
        const Trajectory query = d.query.slice(0, o.seq_len);

        ProjectionSpec pspec;
        pspec.source_dim = o.dim;
        pspec.target_dim = o.target_dim;
        pspec.seed = o.seed;
        const auto p0 = Clock::now();
        const GaussianProjection grp(pspec);
        const Trajectory ref_p = grp.apply(d.reference);
        const Trajectory qry_p = grp.apply(query);
        const double projection_s = seconds_since(p0);

        struct Config {
          const char* name;
          const Trajectory* ref;
          const Trajectory* qry;
          bool restricted;
        };
        const Config configs[] = {{"original", &d.reference, &query, false},
                                  {"grp", &ref_p, &qry_p, false},
                                  {"grp+ra", &ref_p, &qry_p, true}};
        for (const Config& c : configs) {
          AlignConfig acfg;
          acfg.restricted = c.restricted;
          acfg.xi = o.xi;
          double dch = kInfinity, retrieval = kInfinity;
          std::optional<std::uint64_t> cells;
          for (std::size_t rep = 0; rep < o.reps; ++rep) {
            const auto t0 = Clock::now();
            const DistanceMatrix grid = image_distance_matrix(*c.qry, *c.ref, acfg);
            dch = std::min(dch, seconds_since(t0));
            const auto t1 = Clock::now();
            const SearchResult r = search(grid.view(), rcfg);
            retrieval = std::min(retrieval, seconds_since(t1));
            if (cells && *cells != r.dp_cell_updates) {
              err << "warning: cell count changed between repetitions\n";
            }
            cells = r.dp_cell_updates;
          }
          s << n << "," << c.name << "," << c.ref->dim() << "," << (c.restricted ? 1 : 0) << "," << secs(dch)
            << "," << secs(retrieval) << "," << secs(c.ref == &d.reference ? 0.0 : projection_s)
            << "," << *cells << "\n";
        }
      }
      commit(o.output, s.str(), out);
    };
  });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequence-alignment place recognition over feature bundles", "vpralign"};
  app.require_subcommand(1);
  std::size_t workers = 0;
  app.add_option("--threads", workers, "worker threads, 0 for hardware concurrency")->capture_default_str();

  std::function<void()> action;
  SynthOptions synth;
  ProjectOptions proj;
  MatchOptions match;
  EvalOptions eval;
  BenchOptions bench;
  add_synth(app, synth, action, out, err);
  add_project(app, proj, action);
  add_match(app, match, action, out);
  add_eval(app, eval, action, out, err);
  add_bench(app, bench, action, out, err);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    set_worker_count(workers);
    action();
  } catch (const SeedMismatchError& e) {
    err << "error: " << e.what() << "\n";
    return kSeedMismatchExit;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace vpralign::cli

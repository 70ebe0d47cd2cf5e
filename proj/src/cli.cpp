#include "seclab/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "seclab/ballbins.hpp"
#include "seclab/channel.hpp"
#include "seclab/codebook.hpp"
#include "seclab/errors.hpp"
#include "seclab/io.hpp"
#include "seclab/region.hpp"
#include "seclab/rng.hpp"
#include "seclab/secrecy.hpp"

namespace seclab {

using ojson = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

std::string manifest_to_json(const RunManifest& m)
{
    ojson j;
    j["command"] = m.command;
    j["args"] = m.args;
    j["seed"] = m.seed;
    j["version"] = m.version;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    ojson d = ojson::object();
    for (const auto& [k, v] : m.digests) d[k] = v;
    j["digests"] = d;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text)
{
    RunManifest m;
    try {
        const auto j = nlohmann::json::parse(text);
        m.command = j.at("command").get<std::string>();
        m.args = j.at("args").get<std::vector<std::string>>();
        m.seed = j.value("seed", std::uint64_t{0});
        m.version = j.value("version", std::string{});
        m.started_at = j.value("started_at", std::string{});
        m.finished_at = j.value("finished_at", std::string{});
        for (const auto& [k, v] : j.at("digests").items()) m.digests[k] = v.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

namespace {

std::string utc_now()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

/// What a subcommand produced; written out by dispatch().
struct Outcome {
    std::string printed;
    std::vector<std::pair<std::string, std::string>> files;
    std::uint64_t seed = 0;
};

struct RateOptions {
    int n = 8;
    double r1 = 0.0, r2 = 0.0, rl1 = 0.0, rl2 = 0.0;
    double eps_pair = 0.1;
    std::uint64_t seed = 0;

    MartonConfig config() const
    {
        MartonConfig c;
        c.n = n;
        c.r1 = r1;
        c.r2 = r2;
        c.rl1 = rl1;
        c.rl2 = rl2;
        c.eps_pair = eps_pair;
        c.seed = seed;
        return c;
    }
};

void add_rate_options(CLI::App* sub, RateOptions& o)
{
    sub->add_option("--n", o.n, "block length")->required();
    sub->add_option("--r1", o.r1, "message rate R1 (bits)");
    sub->add_option("--r2", o.r2, "message rate R2 (bits)");
    sub->add_option("--rl1", o.rl1, "randomization rate Rl1 (bits)");
    sub->add_option("--rl2", o.rl2, "randomization rate Rl2 (bits)");
    sub->add_option("--eps-pair", o.eps_pair, "typicality slack for pair preselection")->capture_default_str();
    sub->add_option("--seed", o.seed, "master seed")->capture_default_str();
}

ojson config_json(const MartonConfig& c)
{
    ojson j;
    j["n"] = c.n;
    j["r1"] = c.r1;
    j["r2"] = c.r2;
    j["rl1"] = c.rl1;
    j["rl2"] = c.rl2;
    j["eps_pair"] = c.eps_pair;
    j["M1"] = c.m1();
    j["M2"] = c.m2();
    j["L1"] = c.l1();
    j["L2"] = c.l2();
    return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson profile_json(const MutualInfoProfile& mi)
{
    ojson j;
    j["i_u1_y1"] = mi.i_u1_y1;
    j["i_u2_y2"] = mi.i_u2_y2;
    j["i_u1_z"] = mi.i_u1_z;
    j["i_u2_z"] = mi.i_u2_z;
    j["i_u1_u2"] = mi.i_u1_u2;
    return j;
}

void require_matching(const AuxiliaryStructure& aux, const BroadcastChannelSpec& ch)
{
    if (aux.x_size() != ch.x_size())
        throw ValidationError("aux map output alphabet (" + std::to_string(aux.x_size()) +
                              ") differs from channel input alphabet (" + std::to_string(ch.x_size()) + ")");
}

Outcome run_ballbins(std::uint64_t t, std::uint64_t s, std::uint64_t trials, std::uint64_t seed)
{
    const OccupancyParams p{t, s};
    const auto st = occupancy_stats(p);
    ojson j;
    j["t"] = t;
    j["s"] = s;
    j["mean"] = st.mean;
    j["variance"] = st.variance;
    j["mean_fraction"] = st.mean_fraction;
    if (trials > 0) {
        const auto sim = simulate_distinct(p, trials, seed);
        ojson js;
        js["trials"] = trials;
        js["seed"] = seed;
        js["mean"] = sim.mean;
        js["variance"] = sim.variance;
        js["standard_error"] = std::sqrt(st.variance / static_cast<double>(trials));
        j["simulation"] = js;
    }
    return {dump(j), {}, seed};
}

Outcome run_codebook_sim(const std::string& aux_path, const RateOptions& o, std::uint64_t draws,
                         const std::string& dump_path)
{
    if (draws == 0) throw ValidationError("--draws must be positive");
    const auto aux = load_aux(aux_path);
    const MartonConfig cfg = o.config();
    cfg.validate();

    ojson j;
    j["config"] = config_json(cfg);
    j["draws"] = draws;
    double f1 = 0.0, f2 = 0.0, fail = 0.0;
    Outcome out;
    out.seed = o.seed;
    for (std::uint64_t d = 0; d < draws; ++d) {
        const MartonConfig c = draw_config(cfg, o.seed, d);
        const auto cb = MartonCodebook::generate(c, aux);
        const auto sel = preselect_pairs(cb, c.seed);
        const auto rep = count_distinct(sel, cb);
        f1 += rep.mean_fraction(1);
        f2 += rep.mean_fraction(2);
        fail += static_cast<double>(rep.failure_count) / static_cast<double>(cb.m1() * cb.m2());
        if (d == 0) {
            ojson r;
            r["counts1"] = rep.counts1;
            r["counts2"] = rep.counts2;
            r["fractions1"] = rep.fractions1;
            r["fractions2"] = rep.fractions2;
            r["failure_count"] = rep.failure_count;
            j["report"] = r;
            if (!dump_path.empty()) {
                std::ostringstream csv;
                write_codebook_csv(csv, cb);
                out.files.emplace_back(dump_path, csv.str());
            }
        }
    }
    const double dn = static_cast<double>(draws);
    j["mean_fraction_1"] = f1 / dn;
    j["mean_fraction_2"] = f2 / dn;
    j["mean_failure_fraction"] = fail / dn;
    ojson pred;
    pred["expected_distinct_1"] = expected_distinct({cfg.l1(), cfg.m2()});
    pred["fraction_1"] = expected_distinct({cfg.l1(), cfg.m2()}) / static_cast<double>(cfg.l1());
    pred["expected_distinct_2"] = expected_distinct({cfg.l2(), cfg.m1()});
    pred["fraction_2"] = expected_distinct({cfg.l2(), cfg.m1()}) / static_cast<double>(cfg.l2());
    j["prediction"] = pred;
    j["occupancy_condition"] = theorem1_condition(cfg.r1, cfg.r2, cfg.rl1, cfg.rl2);
    out.printed = dump(j);
    return out;
}

Outcome run_leakage(const std::string& ch_path, const std::string& aux_path, const RateOptions& o,
                    std::uint64_t draws)
{
    const auto ch = load_channel(ch_path);
    const auto aux = load_aux(aux_path);
    require_matching(aux, ch);
    const auto rep = average_leakage(o.config(), aux, ch, draws, o.seed);
    ojson j;
    j["config"] = config_json(o.config());
    j["n"] = rep.n;
    j["codebook_draws"] = rep.codebook_draws;
    j["leakage_rate_1"] = rep.leakage_rate_1;
    j["leakage_rate_2"] = rep.leakage_rate_2;
    j["spread_1"] = rep.spread_1;
    j["spread_2"] = rep.spread_2;
    j["joint_leakage_rate"] = rep.joint_leakage_rate;
    j["flagged_draws"] = rep.flagged_draws;
    auto per = ojson::array();
    for (const auto& v : rep.per_draw_values) {
        ojson e;
        e["rate1"] = v.rate1;
        e["rate2"] = v.rate2;
        e["joint_rate"] = v.joint_rate;
        e["substituted_failures"] = v.substituted_failures;
        per.push_back(e);
    }
    j["per_draw_values"] = per;
    return {dump(j), {}, o.seed};
}

Outcome run_errors(const std::string& ch_path, const std::string& aux_path, const RateOptions& o,
                   std::uint64_t trials, double eps_dec, const std::string& decoder)
{
    const auto ch = load_channel(ch_path);
    const auto aux = load_aux(aux_path);
    require_matching(aux, ch);
    DecoderKind kind;
    if (decoder == "typicality")
        kind = DecoderKind::JointTypicality;
    else if (decoder == "ml")
        kind = DecoderKind::MaximumLikelihood;
    else
        throw ValidationError("--decoder must be 'typicality' or 'ml'");
    const MartonConfig c = draw_config(o.config(), o.seed, 0);
    const auto cb = MartonCodebook::generate(c, aux);
    const auto sel = preselect_pairs(cb, c.seed);
    const auto rep = estimate_error_prob(cb, sel, ch, trials, derive_seed(o.seed, streams::kMessages), eps_dec, kind);
    ojson j;
    j["config"] = config_json(o.config());
    j["decoder"] = to_string(rep.decoder);
    j["trials"] = rep.trials;
    j["p_err_1"] = rep.p_err_1;
    j["p_err_2"] = rep.p_err_2;
    j["stderr_1"] = rep.stderr_1;
    j["stderr_2"] = rep.stderr_2;
    j["encoding_failures"] = rep.encoding_failures;
    j["preselection_failures"] = sel.failure_count();
    return {dump(j), {}, o.seed};
}

Outcome run_region(const std::string& ch_path, std::size_t u1, std::size_t u2, std::size_t samples,
                   std::uint64_t seed, bool grid, const std::string& out_path)
{
    const auto ch = load_channel(ch_path);
    const auto res = search_distributions(ch, u1, u2, samples, seed, grid ? SearchMode::Grid : SearchMode::Random);
    std::vector<RatePolygon> polys;
    std::vector<std::size_t> ids;
    for (const auto& s : res.samples) {
        polys.push_back(s.polygon);
        ids.push_back(s.index);
    }
    std::ostringstream csv;
    write_plot_data(csv, polys, ids);

    Outcome out;
    out.seed = seed;
    if (out_path.empty()) {
        out.printed = csv.str();
        return out;
    }
    out.files.emplace_back(out_path, csv.str());
    ojson j;
    j["mode"] = grid ? "grid" : "random";
    j["evaluated"] = res.evaluated;
    j["surviving"] = res.samples.size();
    auto hull = ojson::array();
    for (const auto& p : res.union_hull) hull.push_back({p[0], p[1]});
    j["union_hull"] = hull;
    out.printed = dump(j);
    return out;
}

Outcome run_fm(const std::string& system_path, const std::vector<double>& pre_fm,
               const std::vector<std::string>& eliminate)
{
    ConstraintSystem sys;
    if (!pre_fm.empty()) {
        if (pre_fm.size() != 5) throw ValidationError("--pre-fm expects five values: IU1Y1,IU2Y2,IU1Z,IU2Z,IU1U2");
        sys = pre_fm_system({pre_fm[0], pre_fm[1], pre_fm[2], pre_fm[3], pre_fm[4]});
    } else if (!system_path.empty()) {
        sys = load_system(system_path);
    } else {
        throw ValidationError("fm needs --system or --pre-fm");
    }
    for (const auto& v : eliminate) sys = fourier_motzkin_eliminate(sys, v);
    return {dump(system_to_json(sys)), {}, 0};
}

Outcome run_profile(const std::string& ch_path, const std::string& aux_path)
{
    const auto ch = load_channel(ch_path);
    const auto aux = load_aux(aux_path);
    require_matching(aux, ch);
    const auto mi = induced_distributions(aux, ch);
    ojson j = profile_json(mi);
    const auto sys = theorem2_system(mi);
    j["side_condition"] = !sys.empty_region();
    j["region"] = system_to_json(sys);
    return {dump(j), {}, 0};
}

void emit(const std::string& command, const std::vector<std::string>& args, const Outcome& res,
          const std::string& started, const std::string& manifest_path, std::ostream& out)
{
    RunManifest m;
    m.command = command;
    m.args = args;
    m.seed = res.seed;
    m.started_at = started;
    for (const auto& [path, content] : res.files) {
        write_file(path, content);
        m.digests[path] = sha256_hex(content);
    }
    m.digests["stdout"] = sha256_hex(res.printed);
    out << res.printed;
    out.flush();
    m.finished_at = utc_now();

    std::string where = manifest_path;
    if (where.empty() && !res.files.empty()) where = res.files.front().first + ".manifest.json";
    if (!where.empty()) write_file(where, manifest_to_json(m));
}

int run_replay(const std::string& manifest_path, std::ostream& out, std::ostream& err)
{
    const auto m = manifest_from_json(read_file(manifest_path));
    std::ostringstream captured, captured_err;
    const int code = dispatch(m.args, captured, captured_err);
    if (code != exit_code::kOk) {
        err << captured_err.str();
        return code;
    }
    ojson j;
    bool all = true;
    ojson outputs = ojson::object();
    for (const auto& [name, digest] : m.digests) {
        const std::string now = name == "stdout" ? sha256_hex(captured.str()) : sha256_hex(read_file(name));
        const bool same = now == digest;
        all = all && same;
        outputs[name] = same;
    }
    j["manifest"] = manifest_path;
    j["identical"] = all;
    j["outputs"] = outputs;
    out << dump(j);
    return all ? exit_code::kOk : exit_code::kMismatch;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"seclab: individual-secrecy experiments for Marton-coded broadcast channels", "seclab"};
    app.require_subcommand(1);
    std::string manifest_path;

    std::uint64_t bb_t = 1, bb_s = 0, bb_trials = 0, bb_seed = 0;
    auto* bb = app.add_subcommand("ballbins", "occupancy mean/variance, closed form and Monte Carlo");
    bb->add_option("--t", bb_t, "number of bins")->required();
    bb->add_option("--s", bb_s, "number of balls")->required();
    bb->add_option("--trials", bb_trials, "Monte Carlo trials (0 = closed form only)");
    bb->add_option("--seed", bb_seed, "master seed");

    RateOptions cs_rates;
    std::string cs_aux, cs_dump;
    std::uint64_t cs_draws = 1;
    auto* cs = app.add_subcommand("codebook-sim", "Marton codebook draws and distinct-sequence counts");
    cs->add_option("--aux", cs_aux, "auxiliary structure JSON")->required();
    add_rate_options(cs, cs_rates);
    cs->add_option("--draws", cs_draws, "codebook draws")->capture_default_str();
    cs->add_option("--dump-codebook", cs_dump, "write the first drawn codebook as CSV");

    RateOptions lk_rates;
    std::string lk_ch, lk_aux;
    std::uint64_t lk_draws = 1;
    auto* lk = app.add_subcommand("leakage", "exact eavesdropper leakage averaged over codebooks");
    lk->add_option("--channel", lk_ch, "channel JSON")->required();
    lk->add_option("--aux", lk_aux, "auxiliary structure JSON")->required();
    add_rate_options(lk, lk_rates);
    lk->add_option("--draws", lk_draws, "codebook draws")->capture_default_str();

    RateOptions er_rates;
    std::string er_ch, er_aux, er_decoder = "typicality";
    std::uint64_t er_trials = 1000;
    double er_eps = 0.2;
    auto* er = app.add_subcommand("errors", "Monte Carlo decoding error probability");
    er->add_option("--channel", er_ch, "channel JSON")->required();
    er->add_option("--aux", er_aux, "auxiliary structure JSON")->required();
    add_rate_options(er, er_rates);
    er->add_option("--trials", er_trials, "Monte Carlo trials")->capture_default_str();
    er->add_option("--eps-dec", er_eps, "typicality slack for decoding")->capture_default_str();
    er->add_option("--decoder", er_decoder, "typicality | ml")->capture_default_str();

    std::string rg_ch, rg_out;
    std::size_t rg_u1 = 2, rg_u2 = 2, rg_samples = 100;
    std::uint64_t rg_seed = 0;
    bool rg_grid = false;
    auto* rg = app.add_subcommand("region", "sampled rate regions over auxiliary distributions");
    rg->add_option("--channel", rg_ch, "channel JSON")->required();
    rg->add_option("--u1", rg_u1, "|U1|")->capture_default_str();
    rg->add_option("--u2", rg_u2, "|U2|")->capture_default_str();
    rg->add_option("--samples", rg_samples, "random samples")->capture_default_str();
    rg->add_option("--seed", rg_seed, "master seed");
    rg->add_flag("--grid", rg_grid, "enumerate deterministic maps over a 0.25 joint grid instead of sampling");
    rg->add_option("--out", rg_out, "plot-data CSV path (stdout when omitted)");

    std::string fm_system;
    std::vector<double> fm_pre;
    std::vector<std::string> fm_elim;
    auto* fm = app.add_subcommand("fm", "Fourier-Motzkin elimination on a constraint system");
    fm->add_option("--system", fm_system, "constraint system JSON");
    fm->add_option("--pre-fm", fm_pre, "build the pre-elimination system from IU1Y1,IU2Y2,IU1Z,IU2Z,IU1U2")
        ->delimiter(',');
    fm->add_option("--eliminate", fm_elim, "variables to eliminate, in order")->delimiter(',');

    std::string pf_ch, pf_aux;
    auto* pf = app.add_subcommand("profile", "mutual-information profile of a channel and aux pair");
    pf->add_option("--channel", pf_ch, "channel JSON")->required();
    pf->add_option("--aux", pf_aux, "auxiliary structure JSON")->required();

    std::string rp_manifest;
    auto* rp = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    rp->add_option("manifest", rp_manifest, "manifest JSON")->required();

    for (auto* sub : {bb, cs, lk, er, rg, fm, pf})
        sub->add_option("--manifest", manifest_path, "manifest path (default: beside the first output file)");

    if (args.empty()) {
        out << app.help();
        return exit_code::kValidation;
    }

    std::vector<std::string> storage{"seclab"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::kOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            // --help on a subcommand
            const CLI::App* target = &app;
            for (auto* sub : app.get_subcommands()) target = sub;
            out << target->help();
            return exit_code::kOk;
        }
        err << e.what() << "\n" << app.help();
        return exit_code::kValidation;
    }

    const std::string started = utc_now();
    try {
        Outcome res;
        std::string command;
        if (bb->parsed()) {
            command = "ballbins";
            res = run_ballbins(bb_t, bb_s, bb_trials, bb_seed);
        } else if (cs->parsed()) {
            command = "codebook-sim";
            res = run_codebook_sim(cs_aux, cs_rates, cs_draws, cs_dump);
        } else if (lk->parsed()) {
            command = "leakage";
            res = run_leakage(lk_ch, lk_aux, lk_rates, lk_draws);
        } else if (er->parsed()) {
            command = "errors";
            res = run_errors(er_ch, er_aux, er_rates, er_trials, er_eps, er_decoder);
        } else if (rg->parsed()) {
            command = "region";
            res = run_region(rg_ch, rg_u1, rg_u2, rg_samples, rg_seed, rg_grid, rg_out);
        } else if (fm->parsed()) {
            command = "fm";
            res = run_fm(fm_system, fm_pre, fm_elim);
        } else if (pf->parsed()) {
            command = "profile";
            res = run_profile(pf_ch, pf_aux);
        } else if (rp->parsed()) {
            return run_replay(rp_manifest, out, err);
        }
        emit(command, args, res, started, manifest_path, out);
        return exit_code::kOk;
    } catch (const SizeError& e) {
        err << "size guard: " << e.what() << "\n";
        return exit_code::kSizeGuard;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return exit_code::kIo;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_code::kValidation;
    } catch (const EncodingError& e) {
        err << "encoding error: " << e.what() << "\n";
        return exit_code::kValidation;
    }
}

} // namespace seclab

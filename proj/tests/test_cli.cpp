#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fixtures.hpp"
#include "seclab/cli.hpp"
#include "seclab/io.hpp"
#include "seclab/region.hpp"

using namespace seclab;
using namespace seclab::testing;
using nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const std::string kDir = "cli_fixtures";

std::string fixture(const std::string& name, const std::string& content)
{
    std::filesystem::create_directories(kDir);
    const std::string path = kDir + "/" + name;
    write_file(path, content);
    return path;
}

std::string binary_channel(double f1, double f2, double fz)
{
    return fixture("ch_" + std::to_string(f1) + "_" + std::to_string(f2) + "_" + std::to_string(fz) + ".json",
                   channel_to_json(BroadcastChannelSpec::from_components(bsc(f1), bsc(f2), bsc(fz))).dump());
}

std::string xor_aux()
{
    return fixture("aux_xor.json", aux_to_json(aux_xor(dsbs(0.3))).dump());
}

} // namespace

TEST_CASE("usage and help")
{
    const auto none = run({});
    CHECK(none.code == exit_code::kValidation);
    CHECK(none.out.find("ballbins") != std::string::npos);
    CHECK(none.out.find("region") != std::string::npos);

    CHECK(run({"--help"}).code == exit_code::kOk);
    for (const std::string sub : {"ballbins", "codebook-sim", "leakage", "errors", "region", "fm", "profile", "replay"}) {
        const auto h = run({sub, "--help"});
        CAPTURE(sub);
        CHECK(h.code == exit_code::kOk);
        CHECK(h.out.find("--") != std::string::npos);
    }
    CHECK(run({"frobnicate"}).code == exit_code::kValidation);
    CHECK(run({"ballbins", "--t", "2"}).code == exit_code::kValidation);
}

TEST_CASE("ballbins")
{
    const auto r = run({"ballbins", "--t", "2", "--s", "2"});
    REQUIRE(r.code == exit_code::kOk);
    const auto j = json::parse(r.out);
    CHECK(j.at("mean").get<double>() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(j.at("variance").get<double>() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK_FALSE(j.contains("simulation"));

    const auto sim = run({"ballbins", "--t", "16", "--s", "64", "--trials", "5000", "--seed", "3"});
    REQUIRE(sim.code == exit_code::kOk);
    CHECK(sim.out == run({"ballbins", "--t", "16", "--s", "64", "--trials", "5000", "--seed", "3"}).out);
    const auto sj = json::parse(sim.out);
    const auto js = sj.at("simulation");
    CHECK(std::abs(js.at("mean").get<double>() - sj.at("mean").get<double>()) <=
          4.0 * js.at("standard_error").get<double>());
    CHECK(run({"ballbins", "--t", "0", "--s", "2"}).code == exit_code::kValidation);
    CHECK(run({"ballbins", "--t", "x", "--s", "2"}).code == exit_code::kValidation);
}

TEST_CASE("fm reproduces the rate region from the pre-elimination system")
{
    const MutualInfoProfile mi{1, 1, 0.2, 0.3, 0.4};
    const auto sys_path = fixture("prefm.json", system_to_json(pre_fm_system(mi)).dump(2));
    const auto a = run({"fm", "--system", sys_path, "--eliminate", "Rl1,Rl2"});
    REQUIRE(a.code == exit_code::kOk);
    const auto projected = system_from_json(json::parse(a.out));
    CHECK(projected.variables() == std::vector<std::string>{"R1", "R2"});
    CHECK(equivalent_systems(projected, theorem2_system(mi)));
    std::size_t rate_rows = 0;
    for (const auto& c : remove_redundant(projected).constraints())
        if (!c.is_feasibility_condition() && c.strict()) ++rate_rows;
    CHECK(rate_rows == 6);

    const auto b = run({"fm", "--pre-fm", "1,1,0.2,0.3,0.4", "--eliminate", "Rl1,Rl2"});
    REQUIRE(b.code == exit_code::kOk);
    CHECK(b.out == a.out);

    CHECK(run({"fm", "--eliminate", "Rl1"}).code == exit_code::kValidation);
    CHECK(run({"fm", "--pre-fm", "1,1,0.2", "--eliminate", "Rl1"}).code == exit_code::kValidation);
    CHECK(run({"fm", "--system", sys_path, "--eliminate", "Q"}).code == exit_code::kValidation);
    CHECK(run({"fm", "--system", kDir + "/absent.json"}).code == exit_code::kIo);
    CHECK(run({"fm", "--system", fixture("garbage.json", "[1,")}).code == exit_code::kValidation);
}

TEST_CASE("profile")
{
    const auto ch = binary_channel(0.0, 0.0, 0.5);
    const auto aux = fixture("aux_u1.json", aux_to_json(aux_x_is_u1(independent_uniform_pair())).dump());
    const auto r = run({"profile", "--channel", ch, "--aux", aux});
    REQUIRE(r.code == exit_code::kOk);
    const auto j = json::parse(r.out);
    CHECK(j.at("i_u1_y1").get<double>() == doctest::Approx(1.0));
    CHECK(std::abs(j.at("i_u2_y2").get<double>()) <= 1e-12);
    CHECK(std::abs(j.at("i_u1_z").get<double>()) <= 1e-12);
    CHECK(j.at("side_condition").get<bool>() == false);
    CHECK(j.at("region").contains("vars"));

    const auto quaternary = fixture(
        "ch4.json", channel_to_json(BroadcastChannelSpec::from_components(bit_of_pair(0, 0), bit_of_pair(1, 0),
                                                                          bit_of_pair(0, 0.5)))
                        .dump());
    CHECK(run({"profile", "--channel", quaternary, "--aux", aux}).code == exit_code::kValidation);
}

TEST_CASE("codebook-sim")
{
    const auto aux = xor_aux();
    const auto r = run({"codebook-sim", "--aux", aux, "--n", "8", "--r1", "0.25", "--r2", "0.5", "--rl1", "0.25",
                        "--rl2", "0.125", "--eps-pair", "10", "--draws", "5", "--seed", "4", "--dump-codebook",
                        kDir + "/cb.csv"});
    REQUIRE(r.code == exit_code::kOk);
    const auto j = json::parse(r.out);
    CHECK(j.at("draws") == 5);
    CHECK(j.at("report").at("counts1").size() == 4);
    CHECK(j.at("prediction").at("fraction_1").get<double>() == doctest::Approx(1 - std::pow(0.75, 16)));
    CHECK(j.at("occupancy_condition").get<bool>());
    const auto csv = slurp(kDir + "/cb.csv");
    CHECK(csv.rfind("i,m,l,symbols\n", 0) == 0);
    // M1 * L1 + M2 * L2 = 4 * 4 + 16 * 2 rows plus the header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 49);
    CHECK(std::filesystem::exists(kDir + "/cb.csv.manifest.json"));

    const auto big = run({"codebook-sim", "--aux", aux, "--n", "20", "--r1", "0.5", "--r2", "0.5", "--rl1", "0.5",
                          "--rl2", "0.5"});
    CHECK(big.code == exit_code::kSizeGuard);
    CHECK(big.err.find("guard") != std::string::npos);
    CHECK(run({"codebook-sim", "--aux", aux, "--n", "4", "--rl1", "-1"}).code == exit_code::kValidation);
    CHECK(run({"codebook-sim", "--aux", aux, "--n", "4", "--draws", "0"}).code == exit_code::kValidation);
}

TEST_CASE("leakage and errors")
{
    const auto aux = xor_aux();
    const auto ch = binary_channel(0.05, 0.1, 0.3);
    const std::vector<std::string> rates{"--n", "6", "--r1", "0.2", "--r2", "0.2", "--rl1", "0.2", "--rl2", "0.2",
                                         "--eps-pair", "10", "--seed", "9"};
    auto args = std::vector<std::string>{"leakage", "--channel", ch, "--aux", aux, "--draws", "4"};
    args.insert(args.end(), rates.begin(), rates.end());
    const auto l = run(args);
    REQUIRE(l.code == exit_code::kOk);
    const auto lj = json::parse(l.out);
    CHECK(lj.at("per_draw_values").size() == 4);
    CHECK(lj.at("leakage_rate_1").get<double>() >= 0.0);
    CHECK(lj.at("leakage_rate_1").get<double>() <= std::log2(3.0) / 6 + 1e-9);
    CHECK(run(args).out == l.out);

    auto big = std::vector<std::string>{"leakage", "--channel", ch, "--aux", aux, "--n", "16", "--r1", "0.5"};
    CHECK(run(big).code == exit_code::kSizeGuard);

    auto eargs = std::vector<std::string>{"errors", "--channel", ch, "--aux", aux, "--trials", "300",
                                          "--decoder", "ml"};
    eargs.insert(eargs.end(), rates.begin(), rates.end());
    const auto e = run(eargs);
    REQUIRE(e.code == exit_code::kOk);
    const auto ej = json::parse(e.out);
    CHECK(ej.at("decoder") == "maximum-likelihood");
    CHECK(ej.at("trials") == 300);
    CHECK(ej.at("p_err_1").get<double>() >= 0.0);
    CHECK(ej.at("p_err_1").get<double>() <= 1.0);
    eargs[8] = "psychic";
    CHECK(run(eargs).code == exit_code::kValidation);
}

TEST_CASE("region output, manifests and replay")
{
    const auto ch = binary_channel(0.05, 0.1, 0.3);
    const std::string csv = kDir + "/region.csv";
    const std::vector<std::string> args{"region", "--channel", ch, "--u1", "2", "--u2", "2", "--samples", "40",
                                        "--seed", "5", "--out", csv};
    const auto first = run(args);
    REQUIRE(first.code == exit_code::kOk);
    const auto bytes = slurp(csv);
    CHECK(bytes.rfind("sample_id,vertex_index,r1,r2\n", 0) == 0);
    const auto summary = json::parse(first.out);
    CHECK(summary.at("evaluated") == 40);

    const auto again = run(args);
    CHECK(slurp(csv) == bytes);
    CHECK(again.out == first.out);

    const auto manifest_path = csv + ".manifest.json";
    REQUIRE(std::filesystem::exists(manifest_path));
    const auto manifest = manifest_from_json(slurp(manifest_path));
    CHECK(manifest.command == "region");
    CHECK(manifest.seed == 5);
    CHECK(manifest.version == kToolVersion);
    CHECK(manifest.args == args);
    CHECK(manifest.digests.at(csv) == sha256_hex(bytes));
    CHECK(manifest.digests.count("stdout") == 1);

    const auto replay = run({"replay", manifest_path});
    CHECK(replay.code == exit_code::kOk);
    CHECK(json::parse(replay.out).at("identical") == true);

    // a doctored digest is reported as a mismatch
    auto doctored = manifest;
    doctored.digests[csv] = sha256_hex("something else");
    const auto doctored_path = fixture("doctored.manifest.json", manifest_to_json(doctored));
    const auto bad = run({"replay", doctored_path});
    CHECK(bad.code == exit_code::kMismatch);
    CHECK(json::parse(bad.out).at("identical") == false);
    CHECK(run({"replay", kDir + "/missing.manifest.json"}).code == exit_code::kIo);

    // stdout-only runs write a manifest when asked
    const std::string stdout_manifest = kDir + "/fm.manifest.json";
    const auto fm = run({"fm", "--pre-fm", "1,1,0.2,0.3,0.4", "--eliminate", "Rl1,Rl2", "--manifest", stdout_manifest});
    REQUIRE(fm.code == exit_code::kOk);
    const auto fm_manifest = manifest_from_json(slurp(stdout_manifest));
    CHECK(fm_manifest.digests.at("stdout") == sha256_hex(fm.out));
    CHECK(run({"replay", stdout_manifest}).code == exit_code::kOk);

    // CSV on stdout when --out is omitted
    const auto printed = run({"region", "--channel", ch, "--samples", "40", "--seed", "5"});
    CHECK(printed.out == bytes);

    const auto grid1 = run({"region", "--channel", ch, "--grid", "--seed", "1"});
    const auto grid2 = run({"region", "--channel", ch, "--grid", "--seed", "2"});
    CHECK(grid1.out == grid2.out);

    CHECK(run({"region", "--channel", ch, "--samples", "3", "--out", kDir + "/no/such/dir/r.csv"}).code ==
          exit_code::kIo);
}

TEST_CASE("manifest JSON")
{
    RunManifest m;
    m.command = "ballbins";
    m.args = {"ballbins", "--t", "2", "--s", "2"};
    m.seed = 11;
    m.started_at = "2026-01-01T00:00:00Z";
    m.digests["stdout"] = sha256_hex("abc");
    CHECK(m.digests["stdout"] == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const auto back = manifest_from_json(manifest_to_json(m));
    CHECK(back.args == m.args);
    CHECK(back.seed == 11);
    CHECK(back.digests == m.digests);
    CHECK_THROWS(manifest_from_json("{}"));
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "seclab/errors.hpp"
#include "seclab/io.hpp"

using namespace seclab;
using namespace seclab::testing;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "seclab_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("channel JSON round trip")
{
    Rng rng(1);
    std::vector<double> flat;
    for (int x = 0; x < 3; ++x) {
        const auto row = random_pmf(rng, 2 * 3 * 2);
        flat.insert(flat.end(), row.probs().begin(), row.probs().end());
    }
    const BroadcastChannelSpec ch(3, 2, 3, 2, flat);
    const auto j = channel_to_json(ch);
    CHECK(j.at("x") == 3);
    CHECK(j.at("p").size() == 3);
    CHECK(j.at("p")[0].size() == 2);
    CHECK(j.at("p")[0][0].size() == 3);
    const auto back = channel_from_json(j);
    CHECK(back.x_size() == 3);
    CHECK(back.z_size() == 2);
    for (std::size_t k = 0; k < flat.size(); ++k) CHECK(back.transition()[k] == flat[k]);

    const auto path = scratch("ch.json");
    write_file(path, j.dump());
    CHECK(load_channel(path).transition()[5] == flat[5]);
}

TEST_CASE("channel JSON validation")
{
    auto j = channel_to_json(BroadcastChannelSpec::from_components(bsc(0.1), bsc(0.2), bsc(0.3)));
    auto bad = j;
    bad.erase("p");
    CHECK_THROWS_AS(channel_from_json(bad), ValidationError);
    bad = j;
    bad["x"] = 3;
    CHECK_THROWS_AS(channel_from_json(bad), ValidationError);
    bad = j;
    bad["p"][0][0][0][0] = 0.9;
    CHECK_THROWS_AS(channel_from_json(bad), ValidationError);
    bad = j;
    bad["z"] = 0;
    CHECK_THROWS_AS(channel_from_json(bad), ValidationError);
    bad = j;
    bad["p"][1][1][1][1] = "x";
    CHECK_THROWS_AS(channel_from_json(bad), ValidationError);
}

TEST_CASE("aux JSON round trip and validation")
{
    const AuxiliaryStructure aux(2, 3, Pmf({0.1, 0.2, 0.1, 0.3, 0.2, 0.1}),
                                 ConditionalPmf({Pmf({1, 0}), Pmf({0.5, 0.5}), Pmf({0, 1}), Pmf({0.2, 0.8}),
                                                 Pmf({1, 0}), Pmf({0, 1})}));
    const auto j = aux_to_json(aux);
    CHECK(j.at("joint").size() == 2);
    CHECK(j.at("joint")[0].size() == 3);
    CHECK(j.at("map").size() == 6);
    const auto back = aux_from_json(j);
    CHECK(back.u1_size() == 2);
    CHECK(back.u2_size() == 3);
    CHECK(back.joint()[3] == 0.3);
    CHECK(back.channel_input_map()(3, 1) == 0.8);

    auto bad = j;
    bad["joint"][0][0] = 0.5;
    CHECK_THROWS_AS(aux_from_json(bad), ValidationError);
    bad = j;
    bad["map"].erase(5);
    CHECK_THROWS_AS(aux_from_json(bad), ValidationError);
    bad = j;
    bad.erase("map");
    CHECK_THROWS_AS(aux_from_json(bad), ValidationError);

    const auto path = scratch("aux.json");
    write_file(path, j.dump(2));
    CHECK(load_aux(path).joint()[5] == 0.1);
}

TEST_CASE("system JSON")
{
    const auto text = R"({"vars":["R1","R2"],"cons":[{"coeffs":{"R1":1.0},"sense":"<","bound":0.8},
        {"coeffs":{"R1":1,"R2":1},"sense":">=","bound":0.4,"label":"sum"},
        {"coeffs":{},"sense":"<","bound":0.6}]})";
    const auto sys = system_from_json(json::parse(text));
    CHECK(sys.variables() == std::vector<std::string>{"R1", "R2"});
    REQUIRE(sys.constraints().size() == 3);
    CHECK(sys.constraints()[0].sense == Sense::Lt);
    CHECK(sys.constraints()[1].label == "sum");
    CHECK(sys.constraints()[2].is_feasibility_condition());

    const auto out = system_to_json(sys);
    CHECK(out.begin().key() == "vars");
    CHECK(out.at("cons")[0].at("sense") == "<");
    CHECK(out.at("cons")[1].at("sense") == ">=");
    CHECK(equivalent_systems(system_from_json(json::parse(out.dump())), sys));

    CHECK_THROWS_AS(system_from_json(json::parse(R"({"cons":[]})")), ValidationError);
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"vars":["x"],"cons":[{"coeffs":{"y":1},"sense":"<","bound":1}]})")),
                    ValidationError);
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"vars":["x"],"cons":[{"coeffs":{"x":1},"sense":"=","bound":1}]})")),
                    ValidationError);
    CHECK_THROWS_AS(system_from_json(json::parse(R"({"vars":["x"],"cons":[{"coeffs":{"x":1},"sense":"<"}]})")),
                    ValidationError);
    CHECK(system_from_json(json::parse(R"({"vars":["x"],"cons":[],"empty":true})")).empty_region());
}

TEST_CASE("file errors")
{
    CHECK_THROWS_AS(read_json_file(scratch("missing.json")), IoError);
    const auto path = scratch("broken.json");
    write_file(path, "{not json");
    CHECK_THROWS_AS(read_json_file(path), ValidationError);
    CHECK_THROWS_AS(write_file(scratch("no/such/dir/x.txt"), "a"), IoError);
}

TEST_CASE("decimal formatting")
{
    CHECK(format_decimal(0.1) == "0.1");
    CHECK(format_decimal(1.0 / 3.0) == "0.333333333");
    CHECK(format_decimal(-2.5) == "-2.5");
    CHECK(format_decimal(0.0) == "0");
    CHECK(format_decimal(123456789012.0) == "1.23456789e+11");
}

TEST_CASE("plot data")
{
    std::ostringstream empty;
    write_plot_data(empty, {});
    CHECK(empty.str() == "sample_id,vertex_index,r1,r2\n");

    RatePolygon square;
    square.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::ostringstream one;
    write_plot_data(one, {square});
    CHECK(one.str() == "sample_id,vertex_index,r1,r2\n0,0,0,0\n0,1,1,0\n0,2,1,1\n0,3,0,1\n");

    RatePolygon tri;
    tri.vertices = {{0.1, 0.2}, {0.3, 0.2}, {0.2, 1.0 / 3.0}};
    std::ostringstream two;
    write_plot_data(two, {tri, square}, {7, 9});
    CHECK(two.str().find("7,2,0.2,0.333333333\n") != std::string::npos);
    CHECK(two.str().find("9,0,0,0\n") != std::string::npos);
    CHECK(two.str().find('\r') == std::string::npos);
    CHECK_THROWS_AS(write_plot_data(two, {tri}, {1, 2}), ValidationError);

    const auto path = scratch("plot.csv");
    export_plot_data({tri, square}, path, {7, 9});
    CHECK(slurp(path) == two.str());
    const auto before = slurp(path);
    export_plot_data({tri, square}, path, {7, 9});
    CHECK(slurp(path) == before);
    CHECK_THROWS_AS(export_plot_data({square}, scratch("nope/dir/plot.csv")), IoError);
}

TEST_CASE("codebook CSV")
{
    MartonConfig cfg;
    cfg.n = 3;
    cfg.r1 = 1.0 / 3.0;
    cfg.eps_pair = 10.0;
    const auto aux = aux_xor(independent_uniform_pair());
    const auto cb = MartonCodebook::from_sequences(cfg, aux, {{{0, 1, 1}}, {{1, 1, 0}}}, {{{0, 0, 1}}});
    std::ostringstream out;
    write_codebook_csv(out, cb);
    CHECK(out.str() == "i,m,l,symbols\n1,0,0,0 1 1\n1,1,0,1 1 0\n2,0,0,0 0 1\n");
}

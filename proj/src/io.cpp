#include "seclab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "seclab/errors.hpp"

namespace seclab {

using nlohmann::json;

namespace {

std::size_t positive_size(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw ValidationError(std::string("missing or non-integer field '") + key + "'");
    const auto v = j.at(key).get<long long>();
    if (v <= 0) throw ValidationError(std::string("field '") + key + "' must be positive");
    return static_cast<std::size_t>(v);
}

const json& array_of(const json& j, std::size_t size, const char* what)
{
    if (!j.is_array() || j.size() != size)
        throw ValidationError(std::string(what) + ": expected an array of length " + std::to_string(size));
    return j;
}

double number(const json& j, const char* what)
{
    if (!j.is_number()) throw ValidationError(std::string(what) + ": expected a number");
    return j.get<double>();
}

} // namespace

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

BroadcastChannelSpec channel_from_json(const json& j)
{
    const std::size_t xs = positive_size(j, "x"), y1 = positive_size(j, "y1"), y2 = positive_size(j, "y2"),
                      zs = positive_size(j, "z");
    if (!j.contains("p")) throw ValidationError("channel: missing 'p'");
    std::vector<double> t;
    t.reserve(xs * y1 * y2 * zs);
    const auto& p = array_of(j.at("p"), xs, "channel p");
    for (const auto& px : p)
        for (const auto& py1 : array_of(px, y1, "channel p[x]"))
            for (const auto& py2 : array_of(py1, y2, "channel p[x][y1]"))
                for (const auto& v : array_of(py2, zs, "channel p[x][y1][y2]")) t.push_back(number(v, "channel p"));
    return BroadcastChannelSpec(xs, y1, y2, zs, std::move(t));
}

json channel_to_json(const BroadcastChannelSpec& ch)
{
    json p = json::array();
    for (std::size_t x = 0; x < ch.x_size(); ++x) {
        json a = json::array();
        for (std::size_t y1 = 0; y1 < ch.y1_size(); ++y1) {
            json b = json::array();
            for (std::size_t y2 = 0; y2 < ch.y2_size(); ++y2) {
                json c = json::array();
                for (std::size_t z = 0; z < ch.z_size(); ++z) c.push_back(ch(x, y1, y2, z));
                b.push_back(std::move(c));
            }
            a.push_back(std::move(b));
        }
        p.push_back(std::move(a));
    }
    return json{{"x", ch.x_size()}, {"y1", ch.y1_size()}, {"y2", ch.y2_size()}, {"z", ch.z_size()}, {"p", p}};
}

BroadcastChannelSpec load_channel(const std::filesystem::path& path) { return channel_from_json(read_json_file(path)); }

AuxiliaryStructure aux_from_json(const json& j)
{
    const std::size_t u1 = positive_size(j, "u1"), u2 = positive_size(j, "u2");
    if (!j.contains("joint") || !j.contains("map")) throw ValidationError("aux: missing 'joint' or 'map'");
    std::vector<double> joint;
    for (const auto& row : array_of(j.at("joint"), u1, "aux joint"))
        for (const auto& v : array_of(row, u2, "aux joint row")) joint.push_back(number(v, "aux joint"));
    const auto& map = array_of(j.at("map"), u1 * u2, "aux map");
    if (map.empty() || !map.front().is_array() || map.front().empty())
        throw ValidationError("aux map: rows must be non-empty arrays");
    const std::size_t xs = map.front().size();
    std::vector<Pmf> rows;
    for (const auto& row : map) {
        std::vector<double> r;
        for (const auto& v : array_of(row, xs, "aux map row")) r.push_back(number(v, "aux map"));
        rows.emplace_back(std::move(r));
    }
    return AuxiliaryStructure(u1, u2, Pmf(std::move(joint)), ConditionalPmf(std::move(rows)));
}

json aux_to_json(const AuxiliaryStructure& aux)
{
    json joint = json::array();
    for (std::size_t a = 0; a < aux.u1_size(); ++a) {
        json row = json::array();
        for (std::size_t b = 0; b < aux.u2_size(); ++b) row.push_back(aux.joint()[a * aux.u2_size() + b]);
        joint.push_back(std::move(row));
    }
    json map = json::array();
    const auto& m = aux.channel_input_map();
    for (std::size_t k = 0; k < m.input_size(); ++k) {
        json row = json::array();
        for (std::size_t x = 0; x < m.output_size(); ++x) row.push_back(m(k, x));
        map.push_back(std::move(row));
    }
    return json{{"u1", aux.u1_size()}, {"u2", aux.u2_size()}, {"joint", joint}, {"map", map}};
}

AuxiliaryStructure load_aux(const std::filesystem::path& path) { return aux_from_json(read_json_file(path)); }

ConstraintSystem system_from_json(const json& j)
{
    if (!j.contains("vars") || !j.at("vars").is_array()) throw ValidationError("system: missing 'vars' array");
    std::vector<std::string> vars;
    for (const auto& v : j.at("vars")) {
        if (!v.is_string()) throw ValidationError("system: variable names must be strings");
        vars.push_back(v.get<std::string>());
    }
    ConstraintSystem sys(vars);
    if (j.contains("cons")) {
        for (const auto& c : j.at("cons")) {
            LinearConstraint lc;
            if (c.contains("coeffs")) {
                if (!c.at("coeffs").is_object()) throw ValidationError("system: 'coeffs' must be an object");
                for (const auto& [name, value] : c.at("coeffs").items()) lc.coeffs[name] = number(value, "coefficient");
            }
            if (!c.contains("sense") || !c.at("sense").is_string()) throw ValidationError("system: missing 'sense'");
            lc.sense = parse_sense(c.at("sense").get<std::string>());
            if (!c.contains("bound")) throw ValidationError("system: missing 'bound'");
            lc.bound = number(c.at("bound"), "bound");
            if (c.contains("label") && c.at("label").is_string()) lc.label = c.at("label").get<std::string>();
            sys.add(std::move(lc));
        }
    }
    if (j.contains("empty") && j.at("empty").is_boolean() && j.at("empty").get<bool>()) sys.mark_empty();
    return sys;
}

nlohmann::ordered_json system_to_json(const ConstraintSystem& sys)
{
    nlohmann::ordered_json out;
    out["vars"] = sys.variables();
    auto cons = nlohmann::ordered_json::array();
    for (const auto& c : sys.constraints()) {
        nlohmann::ordered_json jc;
        nlohmann::ordered_json coeffs = nlohmann::ordered_json::object();
        for (const auto& v : sys.variables()) {
            const double k = c.coeff(v);
            if (k != 0.0) coeffs[v] = k;
        }
        jc["coeffs"] = coeffs;
        jc["sense"] = to_string(c.sense);
        jc["bound"] = c.bound;
        if (!c.label.empty()) jc["label"] = c.label;
        cons.push_back(std::move(jc));
    }
    out["cons"] = cons;
    if (sys.empty_region()) out["empty"] = true;
    return out;
}

ConstraintSystem load_system(const std::filesystem::path& path) { return system_from_json(read_json_file(path)); }

std::string format_decimal(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
    return buf;
}

void write_plot_data(std::ostream& out, const std::vector<RatePolygon>& polygons, const std::vector<std::size_t>& ids)
{
    if (!ids.empty() && ids.size() != polygons.size())
        throw ValidationError("write_plot_data: ids and polygons differ in length");
    out << "sample_id,vertex_index,r1,r2\n";
    for (std::size_t k = 0; k < polygons.size(); ++k) {
        const std::size_t id = ids.empty() ? k : ids[k];
        const auto& verts = polygons[k].vertices;
        for (std::size_t v = 0; v < verts.size(); ++v)
            out << id << ',' << v << ',' << format_decimal(verts[v][0]) << ',' << format_decimal(verts[v][1]) << '\n';
    }
}

void export_plot_data(const std::vector<RatePolygon>& polygons, const std::filesystem::path& path,
                      const std::vector<std::size_t>& ids)
{
    std::ostringstream buf;
    write_plot_data(buf, polygons, ids);
    write_file(path, buf.str());
}

void write_codebook_csv(std::ostream& out, const MartonCodebook& cb)
{
    out << "i,m,l,symbols\n";
    for (int i = 1; i <= 2; ++i)
        for (std::size_t m = 0; m < cb.messages(i); ++m)
            for (std::size_t l = 0; l < cb.randomization(i); ++l) {
                out << i << ',' << m << ',' << l << ',';
                const auto seq = cb.sequence(i, m, l);
                for (std::size_t j = 0; j < seq.size(); ++j) out << (j ? " " : "") << seq[j];
                out << '\n';
            }
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

} // namespace seclab

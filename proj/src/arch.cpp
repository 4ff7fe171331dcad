#include "mcsim/arch.hpp"

#include "mcsim/csv.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numeric>
#include <stdexcept>

namespace mcsim::arch {

std::string_view to_string(ArchKind kind)
{
    switch (kind) {
    case ArchKind::MobileGnb: return "mobile_gnb";
    case ArchKind::GnbDuRelay: return "gnb_du_relay";
    case ArchKind::IabNode: return "iab_node";
    }
    return "unknown";
}

ArchKind parse_arch_kind(std::string_view name)
{
    if (name == "mobile_gnb") return ArchKind::MobileGnb;
    if (name == "gnb_du_relay") return ArchKind::GnbDuRelay;
    if (name == "iab_node") return ArchKind::IabNode;
    throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Header table

HeaderTable::HeaderTable()
    : bytes_{
          {"IP", 20},  {"UDP", 8},  {"GTP-U", 8}, {"SDAP", 1}, {"PDCP", 3},
          {"RLC", 3},  {"MAC", 3},  {"BAP", 2},   {"SCTP", 12}, {"SCTP-CHUNK", 16},
          {"F1AP", 0}, {"NGAP", 0}, {"RRC", 0},   {"NAS", 0},
      }
{
}

int HeaderTable::bytes(std::string_view layer) const
{
    const auto it = bytes_.find(layer);
    if (it == bytes_.end()) {
        throw std::invalid_argument("unknown protocol layer '" + std::string(layer) + "'");
    }
    return it->second;
}

void HeaderTable::set(std::string_view layer, int bytes)
{
    const auto it = bytes_.find(layer);
    if (it == bytes_.end()) {
        throw std::invalid_argument("unknown protocol layer '" + std::string(layer) + "'");
    }
    if (bytes < 0) {
        throw std::invalid_argument("header size for " + std::string(layer) + " must be >= 0");
    }
    it->second = bytes;
}

LayerSpec HeaderTable::layer(std::string_view name) const
{
    LayerSpec spec;
    spec.name = std::string(name);
    spec.header_bytes = bytes(name);
    if (name == "SCTP") {
        spec.header_bytes += chunks_per_packet * bytes("SCTP-CHUNK");
    }
    if (name == "GTP-U" || name == "UDP" || name == "SDAP") {
        spec.plane = LayerPlane::UP;
    } else if (name == "SCTP" || name == "F1AP" || name == "NGAP" || name == "RRC" || name == "NAS") {
        spec.plane = LayerPlane::CP;
    }
    return spec;
}

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Splits a `KEY<TAB>value` line; throws with file:line context.
std::pair<std::string, double> split_kv(const std::string& line, const std::string& where)
{
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
        throw std::runtime_error(where + ": expected 'KEY<TAB>value'");
    }
    const std::string key = trim(line.substr(0, tab));
    const std::string text = trim(line.substr(tab + 1));
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) {
            throw std::invalid_argument(text);
        }
        return {key, v};
    } catch (const std::logic_error&) {
        throw std::runtime_error(where + ": unparseable value '" + text + "' for " + key);
    }
}

template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        fn(line, path.string() + ":" + std::to_string(line_no));
    }
}

}  // namespace

HeaderTable load_header_table(const std::filesystem::path& path, HeaderTable base)
{
    for_each_line(path, [&](const std::string& line, const std::string& where) {
        const auto [key, value] = split_kv(line, where);
        if (value != std::floor(value)) {
            throw std::runtime_error(where + ": header size for " + key + " must be an integer");
        }
        try {
            base.set(key, static_cast<int>(value));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
    });
    return base;
}

// ---------------------------------------------------------------------------
// Latencies

double LatencyConfig::backhaul_for(ArchKind kind) const
{
    if (const auto it = per_arch_backhaul_s.find(kind); it != per_arch_backhaul_s.end()) {
        return it->second;
    }
    return backhaul_s.value_or(radio_s);
}

double ProcessingDelays::for_node(std::string_view node) const
{
    const auto it = per_node_s.find(node);
    return it == per_node_s.end() ? default_s : it->second;
}

void load_latency_file(const std::filesystem::path& path, LatencyConfig& latencies,
                       ProcessingDelays& processing)
{
    for_each_line(path, [&](const std::string& line, const std::string& where) {
        const auto [key, ms] = split_kv(line, where);
        if (ms < 0.0) {
            throw std::runtime_error(where + ": latency for " + key + " must be >= 0");
        }
        const double s = ms / 1000.0;
        if (key == "radio") {
            latencies.radio_s = s;
        } else if (key == "wire") {
            latencies.wire_s = s;
        } else if (key == "backhaul") {
            latencies.backhaul_s = s;
        } else if (key == "processing") {
            processing.default_s = s;
        } else if (key.starts_with("node.") && key.size() > 5) {
            processing.per_node_s[key.substr(5)] = s;
        } else if (key.ends_with(".backhaul")) {
            try {
                latencies.per_arch_backhaul_s[parse_arch_kind(key.substr(0, key.size() - 9))] = s;
            } catch (const std::invalid_argument& e) {
                throw std::runtime_error(where + ": " + e.what());
            }
        } else {
            throw std::runtime_error(where + ": unknown latency key '" + key + "'");
        }
    });
}

// ---------------------------------------------------------------------------
// Models

namespace {

class StackBuilder {
public:
    explicit StackBuilder(const HeaderTable& headers) : headers_(headers) {}

    std::vector<LayerSpec> operator()(std::initializer_list<std::string_view> names) const
    {
        std::vector<LayerSpec> out;
        out.reserve(names.size());
        for (const auto n : names) {
            out.push_back(headers_.layer(n));
        }
        return out;
    }

private:
    const HeaderTable& headers_;
};

PathSegment segment(std::string from, std::string to, Medium medium, double latency,
                    std::vector<LayerSpec> stack)
{
    return PathSegment{std::move(from), std::move(to), medium, latency, std::move(stack)};
}

ArchModel build_mobile_gnb(const LatencyConfig& lat, const StackBuilder& s)
{
    const double bh = lat.backhaul_for(ArchKind::MobileGnb);
    ArchModel m;
    m.kind = ArchKind::MobileGnb;
    m.tunnel_depth_backhaul = 2;  // HN N3 tunnel inside the MC-MT PDU session
    m.rrc_terminator = "MC-gNB";
    m.up_path = {
        segment("UE", "MC-gNB", Medium::Radio, lat.radio_s, s({"MAC", "RLC", "PDCP", "SDAP"})),
        segment("MC-gNB", "ON-gNB", Medium::Radio, bh,
                s({"MAC", "RLC", "PDCP", "SDAP", "IP", "UDP", "GTP-U"})),
        segment("ON-gNB", "ON-UPF", Medium::Wire, lat.wire_s,
                s({"IP", "UDP", "GTP-U", "IP", "UDP", "GTP-U"})),
        segment("ON-UPF", "HN-UPF", Medium::Wire, lat.wire_s, s({"IP", "UDP", "GTP-U"})),
    };
    m.cp_path = {
        segment("UE", "MC-gNB", Medium::Radio, lat.radio_s, s({"MAC", "RLC", "PDCP", "RRC", "NAS"})),
        segment("MC-gNB", "ON-gNB", Medium::Radio, bh,
                s({"MAC", "RLC", "PDCP", "SDAP", "IP", "SCTP", "NGAP", "NAS"})),
        segment("ON-gNB", "ON-UPF", Medium::Wire, lat.wire_s,
                s({"IP", "UDP", "GTP-U", "IP", "SCTP", "NGAP", "NAS"})),
        segment("ON-UPF", "HN-AMF", Medium::Wire, lat.wire_s, s({"IP", "SCTP", "NGAP", "NAS"})),
    };
    return m;
}

ArchModel build_gnb_du_relay(const LatencyConfig& lat, const StackBuilder& s)
{
    const double bh = lat.backhaul_for(ArchKind::GnbDuRelay);
    ArchModel m;
    m.kind = ArchKind::GnbDuRelay;
    m.tunnel_depth_backhaul = 2;  // F1 inside the MC-MT PDU session
    m.rrc_terminator = "MC-CU";
    m.up_path = {
        segment("UE", "MC-DU", Medium::Radio, lat.radio_s, s({"MAC", "RLC"})),
        segment("MC-DU", "ON-gNB", Medium::Radio, bh,
                s({"MAC", "RLC", "PDCP", "SDAP", "IP", "UDP", "GTP-U"})),
        segment("ON-gNB", "ON-UPF", Medium::Wire, lat.wire_s,
                s({"IP", "UDP", "GTP-U", "IP", "UDP", "GTP-U"})),
        segment("ON-UPF", "MC-CU", Medium::Wire, lat.wire_s, s({"IP", "UDP", "GTP-U"})),
        segment("MC-CU", "HN-UPF", Medium::Wire, lat.wire_s, s({"IP", "UDP", "GTP-U"})),
    };
    m.cp_path = {
        segment("UE", "MC-DU", Medium::Radio, lat.radio_s, s({"MAC", "RLC"})),
        segment("MC-DU", "ON-gNB", Medium::Radio, bh,
                s({"MAC", "RLC", "PDCP", "SDAP", "IP", "SCTP", "F1AP"})),
        segment("ON-gNB", "ON-UPF", Medium::Wire, lat.wire_s,
                s({"IP", "UDP", "GTP-U", "IP", "SCTP", "F1AP"})),
        segment("ON-UPF", "MC-CU", Medium::Wire, lat.wire_s, s({"IP", "SCTP", "F1AP"})),
        segment("MC-CU", "HN-AMF", Medium::Wire, lat.wire_s, s({"IP", "SCTP", "NGAP", "NAS"})),
    };
    return m;
}

ArchModel build_iab_node(const LatencyConfig& lat, const StackBuilder& s)
{
    const double bh = lat.backhaul_for(ArchKind::IabNode);
    ArchModel m;
    m.kind = ArchKind::IabNode;
    m.tunnel_depth_backhaul = 1;  // F1 over BAP; relaying is layer 2
    m.rrc_terminator = "IAB-donor-CU";
    m.up_path = {
        segment("UE", "MC-DU", Medium::Radio, lat.radio_s, s({"MAC", "RLC"})),
        segment("MC-DU", "IAB-donor-DU", Medium::Radio, bh,
                s({"MAC", "RLC", "BAP", "IP", "UDP", "GTP-U"})),
        segment("IAB-donor-DU", "IAB-donor-CU", Medium::Wire, lat.wire_s, s({"IP", "UDP", "GTP-U"})),
        segment("IAB-donor-CU", "UPF", Medium::Wire, lat.wire_s, s({"IP", "UDP", "GTP-U"})),
    };
    m.cp_path = {
        segment("UE", "MC-DU", Medium::Radio, lat.radio_s, s({"MAC", "RLC"})),
        segment("MC-DU", "IAB-donor-DU", Medium::Radio, bh,
                s({"MAC", "RLC", "BAP", "IP", "SCTP", "F1AP"})),
        segment("IAB-donor-DU", "IAB-donor-CU", Medium::Wire, lat.wire_s, s({"IP", "SCTP", "F1AP"})),
        segment("IAB-donor-CU", "AMF", Medium::Wire, lat.wire_s, s({"IP", "SCTP", "NGAP", "NAS"})),
    };
    return m;
}

void validate_path(const std::vector<PathSegment>& path, const char* label)
{
    if (path.empty()) {
        throw std::invalid_argument(std::string(label) + " path is empty");
    }
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto& seg = path[k];
        if (seg.stack.empty()) {
            throw std::invalid_argument(std::string(label) + " segment " + std::to_string(k) + " has no layers");
        }
        if (!(seg.one_way_latency_s >= 0.0)) {
            throw std::invalid_argument(std::string(label) + " segment " + std::to_string(k) +
                                        " has negative latency");
        }
        for (const auto& layer : seg.stack) {
            if (layer.header_bytes < 0) {
                throw std::invalid_argument("layer " + layer.name + " has a negative header size");
            }
        }
        if (k + 1 < path.size() && seg.to_node != path[k + 1].from_node) {
            throw std::invalid_argument(std::string(label) + " path is disconnected after " + seg.to_node);
        }
    }
}

}  // namespace

void ArchModel::validate() const
{
    validate_path(up_path, "UP");
    validate_path(cp_path, "CP");
    if (tunnel_depth_backhaul < 1) {
        throw std::invalid_argument("backhaul tunnel depth must be >= 1");
    }
    bool found = false;
    for (const auto& seg : cp_path) {
        found = found || seg.to_node == rrc_terminator;
    }
    if (!found) {
        throw std::invalid_argument("RRC terminator '" + rrc_terminator + "' is not on the CP path");
    }
    if (backhaul_segment >= up_path.size() || backhaul_segment >= cp_path.size()) {
        throw std::invalid_argument("backhaul segment index out of range");
    }
}

const std::vector<PathSegment>& ArchModel::path(Plane plane) const
{
    return plane == Plane::CP ? cp_path : up_path;
}

ArchModel build_arch(ArchKind kind, const LatencyConfig& latencies, const HeaderTable& headers)
{
    const StackBuilder stack(headers);
    ArchModel m;
    switch (kind) {
    case ArchKind::MobileGnb: m = build_mobile_gnb(latencies, stack); break;
    case ArchKind::GnbDuRelay: m = build_gnb_du_relay(latencies, stack); break;
    case ArchKind::IabNode: m = build_iab_node(latencies, stack); break;
    default: throw std::invalid_argument("unknown architecture kind");
    }
    m.validate();
    return m;
}

int stack_overhead(std::span<const LayerSpec> stack)
{
    return std::accumulate(stack.begin(), stack.end(), 0,
                           [](int acc, const LayerSpec& l) { return acc + l.header_bytes; });
}

int overhead_bytes(const ArchModel& arch, Plane plane, std::size_t segment_index)
{
    const auto& path = arch.path(plane);
    if (segment_index >= path.size()) {
        throw std::out_of_range("segment " + std::to_string(segment_index) + " does not exist");
    }
    return stack_overhead(path[segment_index].stack);
}

double path_rtt(std::span<const PathSegment> segments, const ProcessingDelays& processing)
{
    double one_way = 0.0;
    for (const auto& seg : segments) {
        const double proc = processing.for_node(seg.to_node);
        if (!(seg.one_way_latency_s >= 0.0) || !(proc >= 0.0)) {
            throw std::invalid_argument("latencies and processing delays must be >= 0");
        }
        one_way += seg.one_way_latency_s + proc;
    }
    return 2.0 * one_way;
}

double path_rtt(const ArchModel& arch, const ProcessingDelays& processing)
{
    std::size_t n = 0;
    while (n < arch.cp_path.size()) {
        if (arch.cp_path[n++].to_node == arch.rrc_terminator) {
            break;
        }
    }
    return path_rtt(std::span(arch.cp_path).first(n), processing);
}

AttachmentOutcome crt_check(const ArchModel& arch, double crt_limit_s, const ProcessingDelays& processing)
{
    if (!(crt_limit_s > 0.0)) {
        throw std::invalid_argument("CRT limit must be > 0");
    }
    AttachmentOutcome out;
    out.rtt_s = path_rtt(arch, processing);
    out.crt_limit_s = crt_limit_s;
    out.success = out.rtt_s <= crt_limit_s;
    return out;
}

Capabilities capabilities(ArchKind kind)
{
    switch (kind) {
    case ArchKind::MobileGnb: return {true, true, true, false};
    case ArchKind::GnbDuRelay: return {false, true, true, false};
    case ArchKind::IabNode: return {false, false, false, true};
    }
    throw std::invalid_argument("unknown architecture kind");
}

std::vector<ComparisonRow> compare_table(std::span<const ArchModel> archs, const ProcessingDelays& processing)
{
    if (archs.empty()) {
        throw std::invalid_argument("compare_table needs at least one architecture");
    }
    std::vector<ComparisonRow> rows;
    rows.reserve(archs.size());
    for (const auto& a : archs) {
        ComparisonRow row;
        row.kind = a.kind;
        for (const auto& seg : a.up_path) {
            (seg.medium == Medium::Radio ? row.radio_hops : row.wire_hops) += 1;
        }
        row.tunnel_depth = a.tunnel_depth_backhaul;
        row.up_overhead_bytes = overhead_bytes(a, Plane::UP, a.backhaul_segment);
        row.cp_overhead_bytes = overhead_bytes(a, Plane::CP, a.backhaul_segment);
        row.cp_rtt_s = path_rtt(a, processing);
        row.caps = capabilities(a.kind);
        rows.push_back(row);
    }
    return rows;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows)
{
    out << kComparisonCsvHeader << '\n';
    for (const auto& r : rows) {
        out << to_string(r.kind) << ',' << r.radio_hops << ',' << r.wire_hops << ',' << r.tunnel_depth << ','
            << r.up_overhead_bytes << ',' << r.cp_overhead_bytes << ',' << csv::format(std::round(r.cp_rtt_s * 1e6) / 1e3)
            << ',' << csv::format(r.caps.onboard_upf) << ',' << csv::format(r.caps.roaming_free) << ','
            << csv::format(r.caps.backhaul_agnostic) << ',' << csv::format(r.caps.e2e_qos) << '\n';
    }
}

}  // namespace mcsim::arch

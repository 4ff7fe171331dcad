#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcsim::arch {

enum class ArchKind {
    MobileGnb,   ///< overlay model, full gNB on board (WAB node)
    GnbDuRelay,  ///< overlay model, DU on board, CU on the home network
    IabNode,     ///< integrated model, mobile IAB-node one hop from the donor
};

std::string_view to_string(ArchKind kind);
ArchKind parse_arch_kind(std::string_view name);

enum class Plane { CP, UP };
enum class LayerPlane { CP, UP, Both };
enum class Medium { Radio, Wire };

struct LayerSpec {
    std::string name;
    int header_bytes = 0;
    LayerPlane plane = LayerPlane::Both;
};

/// Header sizes by layer name. SCTP is the common header; each SCTP layer on a
/// path also carries `chunks_per_packet` DATA chunk headers.
class HeaderTable {
public:
    HeaderTable();

    int bytes(std::string_view layer) const;
    void set(std::string_view layer, int bytes);
    const std::map<std::string, int, std::less<>>& entries() const { return bytes_; }

    LayerSpec layer(std::string_view name) const;

    int chunks_per_packet = 1;

private:
    std::map<std::string, int, std::less<>> bytes_;
};

/// `LAYER<TAB>bytes` lines applied over the defaults. Unknown layers are errors.
HeaderTable load_header_table(const std::filesystem::path& path, HeaderTable base = {});

struct PathSegment {
    std::string from_node;
    std::string to_node;
    Medium medium = Medium::Wire;
    double one_way_latency_s = 0.0;
    std::vector<LayerSpec> stack;  ///< outermost (lowest) layer first
};

/// One-way latencies used when building a model. `backhaul_s` overrides the
/// radio backhaul hop only; `per_arch_backhaul_s` narrows that to one architecture.
struct LatencyConfig {
    double radio_s = 0.002;
    double wire_s = 0.0005;
    std::optional<double> backhaul_s;
    std::map<ArchKind, double> per_arch_backhaul_s;

    double backhaul_for(ArchKind kind) const;
};

/// Per-node processing delay on the CP path; nodes not listed use `default_s`.
struct ProcessingDelays {
    double default_s = 0.002;
    std::map<std::string, double, std::less<>> per_node_s;

    double for_node(std::string_view node) const;
};

/// `KEY<TAB>ms` lines. KEY is radio, wire, backhaul, processing,
/// <arch>.backhaul or node.<NODE-LABEL>.
void load_latency_file(const std::filesystem::path& path, LatencyConfig& latencies,
                       ProcessingDelays& processing);

struct ArchModel {
    ArchKind kind = ArchKind::MobileGnb;
    std::vector<PathSegment> up_path;  ///< UE to the terminating UPF
    std::vector<PathSegment> cp_path;  ///< UE to the terminating AMF
    int tunnel_depth_backhaul = 1;
    std::string rrc_terminator;        ///< node that terminates the UE's RRC
    std::size_t backhaul_segment = 1;  ///< index of the radio backhaul hop on both paths

    /// Throws std::invalid_argument on broken connectivity, empty stacks,
    /// negative latency or an RRC terminator missing from the CP path.
    void validate() const;
    const std::vector<PathSegment>& path(Plane plane) const;
};

ArchModel build_arch(ArchKind kind, const LatencyConfig& latencies = {}, const HeaderTable& headers = {});

int stack_overhead(std::span<const LayerSpec> stack);

/// Header bytes added on `segment_index` of the given plane's path.
/// Throws std::out_of_range for a missing segment.
int overhead_bytes(const ArchModel& arch, Plane plane, std::size_t segment_index);

/// 2 x (sum of one-way latencies + per-node processing) across `segments`,
/// charging processing at every node reached (each segment's to_node).
double path_rtt(std::span<const PathSegment> segments, const ProcessingDelays& processing);

/// CP round trip from the UE to the RRC-terminating node.
double path_rtt(const ArchModel& arch, const ProcessingDelays& processing);

inline constexpr double kMaxContentionResolutionTimer = 0.064;

struct AttachmentOutcome {
    double rtt_s = 0.0;
    double crt_limit_s = kMaxContentionResolutionTimer;
    bool success = false;
};

/// Success iff rtt <= crt_limit (inclusive). Throws if crt_limit <= 0.
AttachmentOutcome crt_check(const ArchModel& arch, double crt_limit_s = kMaxContentionResolutionTimer,
                            const ProcessingDelays& processing = {});

struct Capabilities {
    bool onboard_upf = false;
    bool roaming_free = false;
    bool backhaul_agnostic = false;
    bool e2e_qos = false;
};

/// Static capability flags for each architecture.
Capabilities capabilities(ArchKind kind);

struct ComparisonRow {
    ArchKind kind = ArchKind::MobileGnb;
    int radio_hops = 0;
    int wire_hops = 0;
    int tunnel_depth = 0;
    int up_overhead_bytes = 0;
    int cp_overhead_bytes = 0;
    double cp_rtt_s = 0.0;
    Capabilities caps;
};

/// Throws std::invalid_argument on an empty list.
std::vector<ComparisonRow> compare_table(std::span<const ArchModel> archs,
                                         const ProcessingDelays& processing = {});

inline constexpr std::string_view kComparisonCsvHeader =
    "arch,radio_hops,wire_hops,tunnel_depth,up_overhead_bytes,cp_overhead_bytes,cp_rtt_ms,"
    "onboard_upf,roaming_free,backhaul_agnostic,e2e_qos";

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace mcsim::arch

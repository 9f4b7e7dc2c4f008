#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "handwave/core_types.hpp"

namespace handwave {

/// I2C slave addresses selected by the SEL pin.
constexpr std::uint8_t kAddressSel1 = 0b0011101;
constexpr std::uint8_t kAddressSel0 = 0b0011110;

/// Device identity byte returned by the WHO_AM_I register.
constexpr std::uint8_t kWhoAmI = 0x3F;

/// One bus: the SEL=1 (odd-numbered) sensor, and optionally a SEL=0 partner.
struct Bus {
    int sensor_sel1 = 0;
    std::optional<int> sensor_sel0;
};

/// The 23-bus acquisition network. Buses are ordered branch V, IV, III, II,
/// I, five per full-hand branch (three on digit I), pairing consecutive ids
/// (1,2), (3,4), ...; the last bus of digits II-V carries its odd sensor
/// alone. This bus order is also the on-wire order.
class BusTopology {
public:
    /// Topology for the branches present in `mask`.
    static BusTopology for_branches(BranchMask mask);
    static BusTopology full() { return for_branches(kAllBranches); }

    const std::vector<Bus>& buses() const { return buses_; }
    BranchMask branches() const { return branches_; }

    /// SEL=1 sensor ids, ascending ("odd group"); SEL=0 ids ("even group").
    const std::vector<int>& odd_group() const { return odd_group_; }
    const std::vector<int>& even_group() const { return even_group_; }

    /// All present sensor ids, ascending.
    std::vector<int> sensor_ids() const;

    std::size_t sensor_count() const { return odd_group_.size() + even_group_.size(); }

    /// Preamble length: one WHO_AM_I byte per present sensor, bus-major.
    std::size_t preamble_size() const { return sensor_count(); }

    /// Hash of the canonical topology description; stored in stream headers.
    std::uint64_t hash() const;

private:
    std::vector<Bus> buses_;
    std::vector<int> odd_group_;
    std::vector<int> even_group_;
    BranchMask branches_ = 0;
};

// --------------------------------------------------------------------------
// Stream container. All multi-byte integers little-endian. See
// docs/wire-format.md for the byte-offset table.
//
//   header : magic "WHV1" | u16 version | u8 range_g | u8 branch_mask
//            | f64 rate_hz | u64 topology_hash                     (24 bytes)
//   frame  : u32 counter | preamble (1 byte per sensor, bus-major)
//            | odd-group payloads | even-group payloads | u16 checksum
//
// Payload per sensor: 6 bytes XL XH YL YH ZL ZH, two's-complement 16-bit,
// low byte first. Checksum: sum of this frame's payload bytes mod 65536.
// --------------------------------------------------------------------------

constexpr char kStreamMagic[4] = {'W', 'H', 'V', '1'};
constexpr std::uint16_t kStreamVersion = 1;

struct StreamHeader {
    double rate = 1310.0;
    FullScale range = FullScale::G2;
    BranchMask branches = kAllBranches;
    std::uint64_t topology_hash = 0;
};

std::size_t frame_byte_size(const BusTopology& topology);

/// Byte offset of a sensor's payload within a frame (from frame start).
std::size_t payload_offset(const BusTopology& topology, int sensor_id);

/// Encode one raw frame. Throws EncodeError if the sample misses a sensor
/// present in the topology, or holds out-of-range counts.
std::vector<std::uint8_t> encode_frame(const Sample& sample,
                                       const std::vector<int>& sample_ids,
                                       const BusTopology& topology);

std::vector<std::uint8_t> encode_header(const StreamHeader& header,
                                        const BusTopology& topology);

/// Encode a whole raw stream (header + one record per frame, frame counters
/// taken from the samples).
std::vector<std::uint8_t> encode_stream(const FrameStream& stream);

/// Non-fatal decoder observations.
struct DecodeEvent {
    enum class Kind { FrameGap, TruncatedTail, IdentityMismatch };
    Kind kind;
    std::uint64_t frame_index = 0;  // index in the decoded sequence
    std::uint64_t byte_offset = 0;  // for TruncatedTail
    std::uint32_t counter_from = 0; // for FrameGap: last counter before gap
    std::uint32_t counter_to = 0;   // for FrameGap: counter after gap
    std::string message;
};

struct DecodeResult {
    FrameStream stream;
    StreamHeader header;
    std::vector<DecodeEvent> events;
};

/// Decode a stream. Throws WireFormatError on bad magic/header/topology and
/// CorruptFrameError on a checksum mismatch; frame-counter gaps, WHO_AM_I
/// mismatches and a truncated tail are reported as events, not errors.
DecodeResult decode_stream(const std::vector<std::uint8_t>& bytes);

// --------------------------------------------------------------------------
// Acquisition schedule model.
// --------------------------------------------------------------------------

struct ThroughputEstimate {
    double frames_per_second = 0.0;
    std::vector<double> bus_cycles; // SCL cycles per frame, per bus
    std::size_t limiting_bus = 0;   // index of the slowest bus
};

/// Achievable frame rate for a bus clock. Models, per sensor and frame, one
/// WHO_AM_I read, a data-ready poll loop on the status register, and one
/// six-byte axis-data read, each as an I2C register transaction (start,
/// address+ack, register+ack, repeated start, address+ack, data bytes+ack,
/// stop), plus one inter-frame turnaround per bus. Sensors sharing a bus are
/// read sequentially; buses run in parallel, so the slowest bus sets the
/// rate. The poll count and turnaround are fitted so the reference 1.6 MHz
/// clock reproduces the device's observed 1310 frames/s.
ThroughputEstimate schedule_throughput(double bus_clock_hz, const BusTopology& topology);

} // namespace handwave

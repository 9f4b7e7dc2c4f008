#include "handwave/wire.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

#include "handwave/hash.hpp"

namespace handwave {

namespace {

// SCL cycle model for one I2C register transaction of n data bytes:
// start + (address + ack) + (register + ack) + repeated start +
// (address + ack) + n * (byte + ack) + stop.
constexpr double kStartCycles = 1.0;
constexpr double kStopCycles = 1.0;
constexpr double kByteCycles = 9.0; // 8 data bits + ack

double transaction_cycles(int data_bytes) {
    return kStartCycles + kByteCycles + kByteCycles + kStartCycles + kByteCycles +
           data_bytes * kByteCycles + kStopCycles;
}

// Fitted schedule constants: mean status-register polls until data-ready,
// and idle cycles between frames. With these, 1.6 MHz -> 1310.4 frames/s.
constexpr int kDataReadyPolls = 12;
constexpr double kFrameTurnaroundCycles = 39.0;

double sensor_cycles() {
    const double who_am_i = transaction_cycles(1);
    const double poll = transaction_cycles(1);
    const double data = transaction_cycles(6);
    return who_am_i + kDataReadyPolls * poll + data;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

/// Bounds-checked little-endian reader; every decoder read goes through it.
class Cursor {
public:
    Cursor(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return size_ - pos_; }

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_]) |
                          static_cast<std::uint16_t>(data_[pos_ + 1]) << 8;
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::int16_t i16() { return static_cast<std::int16_t>(u16()); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > size_) throw WireFormatError("unexpected end of stream");
    }
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::int16_t to_count(double v, int sensor_id, char axis) {
    const double r = std::round(v);
    if (r < -32768.0 || r > 32767.0 || r != v)
        throw EncodeError("sensor " + std::to_string(sensor_id) + " axis " + axis +
                          " value is not a 16-bit count");
    return static_cast<std::int16_t>(r);
}

} // namespace

BusTopology BusTopology::for_branches(BranchMask mask) {
    if (mask == 0 || mask > kAllBranches)
        throw ConfigError("branch mask must select between one and five branches");
    BusTopology t;
    t.branches_ = mask;
    // Wire order: branch V, IV, III, II, then I.
    const struct {
        Digit digit;
        int first;
        int buses;
    } plan[] = {{Digit::V, 1, 5}, {Digit::IV, 11, 5}, {Digit::III, 21, 5},
                {Digit::II, 31, 5}, {Digit::I, 41, 3}};
    for (const auto& branch : plan) {
        if (!branch_present(mask, branch.digit)) continue;
        for (int b = 0; b < branch.buses; ++b) {
            Bus bus;
            bus.sensor_sel1 = branch.first + 2 * b;
            const int partner = bus.sensor_sel1 + 1;
            if (valid_sensor_id(partner)) bus.sensor_sel0 = partner;
            t.buses_.push_back(bus);
        }
    }
    for (const auto& bus : t.buses_) {
        t.odd_group_.push_back(bus.sensor_sel1);
        if (bus.sensor_sel0) t.even_group_.push_back(*bus.sensor_sel0);
    }
    std::sort(t.odd_group_.begin(), t.odd_group_.end());
    std::sort(t.even_group_.begin(), t.even_group_.end());
    return t;
}

std::vector<int> BusTopology::sensor_ids() const {
    std::vector<int> ids = odd_group_;
    ids.insert(ids.end(), even_group_.begin(), even_group_.end());
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::uint64_t BusTopology::hash() const {
    std::ostringstream os;
    os << "sel1=" << int(kAddressSel1) << ";sel0=" << int(kAddressSel0) << ";";
    for (const auto& bus : buses_) {
        os << bus.sensor_sel1;
        if (bus.sensor_sel0) os << "," << *bus.sensor_sel0;
        os << ";";
    }
    return fnv1a64(os.str());
}

std::size_t frame_byte_size(const BusTopology& topology) {
    return 4 + topology.preamble_size() + 6 * topology.sensor_count() + 2;
}

std::size_t payload_offset(const BusTopology& topology, int sensor_id) {
    const auto& odd = topology.odd_group();
    const auto& even = topology.even_group();
    std::size_t offset = 4 + topology.preamble_size();
    auto it = std::find(odd.begin(), odd.end(), sensor_id);
    if (it != odd.end())
        return offset + 6 * static_cast<std::size_t>(it - odd.begin());
    it = std::find(even.begin(), even.end(), sensor_id);
    if (it != even.end())
        return offset + 6 * (odd.size() + static_cast<std::size_t>(it - even.begin()));
    throw ConfigError("sensor " + std::to_string(sensor_id) + " not in topology");
}

std::vector<std::uint8_t> encode_frame(const Sample& sample,
                                       const std::vector<int>& sample_ids,
                                       const BusTopology& topology) {
    if (sample.unit != Unit::RawCounts)
        throw EncodeError("encode_frame expects raw counts");
    if (sample.values.size() != sample_ids.size())
        throw EncodeError("sample values do not match the sensor id list");

    std::map<int, const Vec3*> by_id;
    for (std::size_t i = 0; i < sample_ids.size(); ++i)
        by_id[sample_ids[i]] = &sample.values[i];

    std::vector<std::uint8_t> out;
    out.reserve(frame_byte_size(topology));
    put_u32(out, sample.t);
    for (const auto& bus : topology.buses()) {
        out.push_back(kWhoAmI);
        if (bus.sensor_sel0) out.push_back(kWhoAmI);
    }

    std::uint32_t checksum = 0;
    auto emit_group = [&](const std::vector<int>& group) {
        for (int id : group) {
            const auto it = by_id.find(id);
            if (it == by_id.end())
                throw EncodeError("missing value for sensor " + std::to_string(id));
            const Vec3& v = *it->second;
            const char axes[3] = {'x', 'y', 'z'};
            for (int a = 0; a < 3; ++a) {
                const std::int16_t c = to_count(v[a], id, axes[a]);
                const std::uint16_t u = static_cast<std::uint16_t>(c);
                const std::uint8_t lo = u & 0xFF, hi = u >> 8;
                out.push_back(lo);
                out.push_back(hi);
                checksum += lo + hi;
            }
        }
    };
    emit_group(topology.odd_group());
    emit_group(topology.even_group());
    put_u16(out, static_cast<std::uint16_t>(checksum & 0xFFFF));
    return out;
}

std::vector<std::uint8_t> encode_header(const StreamHeader& header,
                                        const BusTopology& topology) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), kStreamMagic, kStreamMagic + 4);
    put_u16(out, kStreamVersion);
    out.push_back(static_cast<std::uint8_t>(header.range));
    out.push_back(header.branches);
    put_f64(out, header.rate);
    put_u64(out, topology.hash());
    return out;
}

std::vector<std::uint8_t> encode_stream(const FrameStream& stream) {
    stream.validate();
    BranchMask mask = 0;
    for (int id : stream.sensor_ids)
        mask |= static_cast<BranchMask>(1 << (static_cast<int>(branch_of(id)) - 1));
    const BusTopology topology = BusTopology::for_branches(mask);
    if (topology.sensor_ids() != stream.sensor_ids)
        throw EncodeError("stream sensor set does not form complete branches");

    StreamHeader header;
    header.rate = stream.rate;
    header.range = stream.range;
    header.branches = mask;
    std::vector<std::uint8_t> out = encode_header(header, topology);
    for (const auto& frame : stream.frames) {
        const auto bytes = encode_frame(frame, stream.sensor_ids, topology);
        out.insert(out.end(), bytes.begin(), bytes.end());
    }
    return out;
}

DecodeResult decode_stream(const std::vector<std::uint8_t>& bytes) {
    Cursor cur(bytes.data(), bytes.size());
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kStreamMagic, 4) != 0)
        throw WireFormatError("bad magic: not a handwave stream");
    for (int i = 0; i < 4; ++i) cur.u8();

    const std::uint16_t version = cur.u16();
    if (version != kStreamVersion)
        throw WireFormatError("unsupported stream version " + std::to_string(version));

    DecodeResult result;
    const int range_g = cur.u8();
    result.header.range = full_scale_from_g(range_g);
    result.header.branches = cur.u8();
    if (result.header.branches == 0 || result.header.branches > kAllBranches)
        throw WireFormatError("header branch mask is invalid");
    result.header.rate = cur.f64();
    if (!(result.header.rate > 0.0) || !std::isfinite(result.header.rate))
        throw WireFormatError("header rate is not a positive number");
    result.header.topology_hash = cur.u64();

    const BusTopology topology = BusTopology::for_branches(result.header.branches);
    if (topology.hash() != result.header.topology_hash)
        throw WireFormatError("topology hash mismatch: stream does not match the "
                              "canonical bus layout for its branch mask");

    FrameStream& stream = result.stream;
    stream.rate = result.header.rate;
    stream.range = result.header.range;
    stream.sensor_ids = topology.sensor_ids();

    const std::size_t fsize = frame_byte_size(topology);
    const std::size_t nsensors = topology.sensor_count();

    // sensor id -> slot in the stream's ascending id list
    std::map<int, std::size_t> slot;
    for (std::size_t i = 0; i < stream.sensor_ids.size(); ++i)
        slot[stream.sensor_ids[i]] = i;

    bool have_prev = false;
    std::uint32_t prev_counter = 0;
    std::uint64_t frame_index = 0;
    while (cur.remaining() > 0) {
        if (cur.remaining() < fsize) {
            DecodeEvent ev;
            ev.kind = DecodeEvent::Kind::TruncatedTail;
            ev.frame_index = frame_index;
            ev.byte_offset = cur.offset();
            ev.message = "truncated frame at byte offset " + std::to_string(cur.offset());
            result.events.push_back(ev);
            break;
        }
        Sample sample;
        sample.unit = Unit::RawCounts;
        sample.range = stream.range;
        sample.values.resize(nsensors);
        sample.t = cur.u32();

        std::size_t preamble_mismatches = 0;
        for (std::size_t i = 0; i < topology.preamble_size(); ++i)
            if (cur.u8() != kWhoAmI) ++preamble_mismatches;
        if (preamble_mismatches > 0) {
            DecodeEvent ev;
            ev.kind = DecodeEvent::Kind::IdentityMismatch;
            ev.frame_index = frame_index;
            ev.message = std::to_string(preamble_mismatches) +
                         " WHO_AM_I byte(s) differ from 0x3F in frame " +
                         std::to_string(frame_index);
            result.events.push_back(ev);
        }

        std::uint32_t checksum = 0;
        auto read_group = [&](const std::vector<int>& group) {
            for (int id : group) {
                Vec3& v = sample.values[slot[id]];
                for (int a = 0; a < 3; ++a) {
                    const std::uint16_t u = cur.u16();
                    checksum += (u & 0xFF) + (u >> 8);
                    v[a] = static_cast<double>(static_cast<std::int16_t>(u));
                }
            }
        };
        read_group(topology.odd_group());
        read_group(topology.even_group());

        const std::uint16_t stored = cur.u16();
        if (stored != static_cast<std::uint16_t>(checksum & 0xFFFF))
            throw CorruptFrameError("checksum mismatch in frame " +
                                        std::to_string(frame_index),
                                    frame_index);

        if (have_prev) {
            if (sample.t <= prev_counter)
                throw CorruptFrameError("frame counter not increasing at frame " +
                                            std::to_string(frame_index),
                                        frame_index);
            if (sample.t != prev_counter + 1) {
                DecodeEvent ev;
                ev.kind = DecodeEvent::Kind::FrameGap;
                ev.frame_index = frame_index;
                ev.counter_from = prev_counter;
                ev.counter_to = sample.t;
                ev.message = "dropped " + std::to_string(sample.t - prev_counter - 1) +
                             " frame(s) between counters " + std::to_string(prev_counter) +
                             " and " + std::to_string(sample.t);
                result.events.push_back(ev);
            }
        }
        prev_counter = sample.t;
        have_prev = true;
        stream.frames.push_back(std::move(sample));
        ++frame_index;
    }
    return result;
}

ThroughputEstimate schedule_throughput(double bus_clock_hz, const BusTopology& topology) {
    if (!(bus_clock_hz > 0.0))
        throw ConfigError("bus clock must be positive");
    ThroughputEstimate est;
    est.bus_cycles.reserve(topology.buses().size());
    double worst = 0.0;
    for (std::size_t i = 0; i < topology.buses().size(); ++i) {
        const Bus& bus = topology.buses()[i];
        const int sensors = bus.sensor_sel0 ? 2 : 1;
        const double cycles = sensors * sensor_cycles() + kFrameTurnaroundCycles;
        est.bus_cycles.push_back(cycles);
        if (cycles > worst) {
            worst = cycles;
            est.limiting_bus = i;
        }
    }
    est.frames_per_second = bus_clock_hz / worst;
    return est;
}

} // namespace handwave

#pragma once

#include <cstdint>

namespace ctbf {

using SubscriberId = uint32_t;

enum class FlowTag : uint8_t { Http = 0, Ftp = 1, Video = 2 };

constexpr uint32_t kDefaultMtuBytes = 1500;

/// A downstream packet as produced by the egress classifier: labeled with the
/// subscriber whose queue it belongs to and the application unit (page, file
/// or frame) it carries a piece of.
struct Packet {
    uint32_t length = 0;            // bytes, 0 < length <= MTU
    SubscriberId subscriber = 0;
    FlowTag flow = FlowTag::Http;
    double created_at = 0.0;        // seconds
    uint64_t unit = 0;              // application unit id
};

} // namespace ctbf

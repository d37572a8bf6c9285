#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctbf/rng.hpp"

namespace ctbf {

/// Web browsing: a closed loop of think time -> request -> response document.
struct HttpModelParams {
    bool enabled = true;
    double page_bytes_median = 320'000.0;
    double page_bytes_sigma = 1.0;     // log-space sigma of the page size distribution
    double think_time_mean_s = 10.0;
    uint32_t objects_per_page = 1;
};

/// Bulk transfer: fixed-size files separated by idle gaps; sessions are
/// serialized per subscriber (a new one starts only after the previous
/// download finished). The default gap leaves enough idle time for a bucket
/// of several file sizes to refill between downloads.
struct FtpModelParams {
    bool enabled = true;
    uint64_t file_bytes = 5'000'000;
    double gap_mean_s = 120.0;
};

/// VBR streaming: sessions of fixed play length with per-frame sizes drawn
/// around the mean rate. A frame counts as decodable only when its last byte
/// arrives by the playout deadline.
struct VideoModelParams {
    bool enabled = true;
    double mean_rate_bps = 2'000'000.0;
    double fps = 25.0;
    double playout_buffer_s = 5.0;
    double session_duration_s = 60.0;
    double gap_mean_s = 120.0;
    double frame_size_cv = 0.5;
    /// Optional frame schedule replacing the synthetic draw:
    /// one frame per line, "frame_index size_bytes deadline_seconds",
    /// deadlines relative to the session start (playout buffer included).
    std::string trace_file;
};

struct TrafficParams {
    uint32_t users_per_subscriber = 1;
    HttpModelParams http;
    FtpModelParams ftp;
    VideoModelParams video;
};

struct HttpCycle {
    double think_s = 0.0;          // idle time before the request goes out
    uint64_t response_bytes = 0;   // document size, delivered over objects_per_page objects
};
HttpCycle next_http_cycle(RandomStream& rng, const HttpModelParams& params);

struct FtpSession {
    double gap_s = 0.0;            // idle time after the previous session completed
    uint64_t file_bytes = 0;
};
FtpSession next_ftp_session(RandomStream& rng, const FtpModelParams& params);

struct VideoFrame {
    uint32_t index = 0;
    uint32_t size_bytes = 0;
    double emit_offset_s = 0.0;      // when the frame leaves the server, from session start
    double deadline_offset_s = 0.0;  // playout deadline, from session start
};

/// Draw one session's frame schedule. Deadlines are emit offsets shifted by
/// the playout buffer and strictly increase.
std::vector<VideoFrame> video_frames(RandomStream& rng, const VideoModelParams& params);

/// Load a frame schedule from a trace file ("frame_index size_bytes
/// deadline_seconds" per line; '#' lines are comments). Emit offsets are
/// index/fps; deadlines are taken verbatim.
std::vector<VideoFrame> video_frames_from_trace(const std::string& path, double fps);

} // namespace ctbf

#include "ctbf/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ctbf {

HttpCycle next_http_cycle(RandomStream& rng, const HttpModelParams& params) {
    HttpCycle cycle;
    cycle.think_s = rng.exponential(params.think_time_mean_s);
    const double bytes = rng.lognormal_median(params.page_bytes_median, params.page_bytes_sigma);
    cycle.response_bytes = static_cast<uint64_t>(std::max(1.0, std::round(bytes)));
    return cycle;
}

FtpSession next_ftp_session(RandomStream& rng, const FtpModelParams& params) {
    FtpSession session;
    session.gap_s = rng.exponential(params.gap_mean_s);
    session.file_bytes = params.file_bytes;
    return session;
}

std::vector<VideoFrame> video_frames(RandomStream& rng, const VideoModelParams& params) {
    const auto count =
        static_cast<uint32_t>(std::max(1.0, std::round(params.session_duration_s * params.fps)));
    const double mean_frame_bytes = params.mean_rate_bps / 8.0 / params.fps;

    std::vector<VideoFrame> frames;
    frames.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        VideoFrame frame;
        frame.index = i;
        const double size = params.frame_size_cv > 0.0
                                ? rng.lognormal_mean_cv(mean_frame_bytes, params.frame_size_cv)
                                : mean_frame_bytes;
        frame.size_bytes = static_cast<uint32_t>(std::max(1.0, std::round(size)));
        frame.emit_offset_s = static_cast<double>(i) / params.fps;
        frame.deadline_offset_s = params.playout_buffer_s + frame.emit_offset_s;
        frames.push_back(frame);
    }
    return frames;
}

std::vector<VideoFrame> video_frames_from_trace(const std::string& path, double fps) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("video trace: cannot open " + path);

    std::vector<VideoFrame> frames;
    std::string line;
    size_t line_no = 0;
    double prev_deadline = -1.0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream fields(line);
        uint64_t index = 0, size = 0;
        double deadline = 0.0;
        if (!(fields >> index >> size >> deadline) || size == 0)
            throw std::runtime_error("video trace: malformed line " + std::to_string(line_no) +
                                     " in " + path);
        if (deadline <= prev_deadline)
            throw std::runtime_error("video trace: deadlines must strictly increase (line " +
                                     std::to_string(line_no) + ")");
        prev_deadline = deadline;

        VideoFrame frame;
        frame.index = static_cast<uint32_t>(index);
        frame.size_bytes = static_cast<uint32_t>(size);
        frame.emit_offset_s = static_cast<double>(frames.size()) / fps;
        frame.deadline_offset_s = deadline;
        frames.push_back(frame);
    }
    if (frames.empty())
        throw std::runtime_error("video trace: no frames in " + path);
    return frames;
}

} // namespace ctbf

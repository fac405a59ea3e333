#include "crackpot/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace crackpot {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_us(Clock::time_point since) {
    return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - since).count();
}

// Candidate boxes with the stage clock running; shared by generate_candidates
// and detect_frame so both always agree.
std::vector<BoundingBox> candidate_boxes(const Image& frame, const BinaryMask& road,
                                         const PipelineConfig& cfg, StageTimings* timings) {
    if (road.width != frame.width || road.height != frame.height)
        throw InvalidParameterError(
            "pipeline.generate_candidates: road mask dimensions do not match the frame");
    cfg.validate();

    auto t0 = Clock::now();
    const Image gray = to_grayscale(frame);
    const BinaryMask edges = canny_edges(gray, cfg.canny_low, cfg.canny_high);
    if (timings) timings->edge_us = elapsed_us(t0);

    t0 = Clock::now();
    const BinaryMask grown = dilate(edges, cfg.dilate_iterations);
    if (timings) timings->dilate_us = elapsed_us(t0);

    t0 = Clock::now();
    const BinaryMask combined = mask_and(road, grown);
    if (timings) timings->combine_us = elapsed_us(t0);

    t0 = Clock::now();
    std::vector<BoundingBox> boxes = extract_boxes(combined, cfg.min_area);
    if (static_cast<int>(boxes.size()) > cfg.max_candidates) {
        std::sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
            if (a.area() != b.area()) return a.area() > b.area();
            return a.y != b.y ? a.y < b.y : a.x < b.x;
        });
        boxes.resize(static_cast<std::size_t>(cfg.max_candidates));
        std::sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
            return a.y != b.y ? a.y < b.y : a.x < b.x;
        });
    }
    if (timings) timings->contours_us = elapsed_us(t0);
    return boxes;
}

}  // namespace

std::vector<std::pair<BoundingBox, CandidatePatch>> generate_candidates(
    const Image& frame, const BinaryMask& road, const PipelineConfig& cfg) {
    const std::vector<BoundingBox> boxes = candidate_boxes(frame, road, cfg, nullptr);
    std::vector<std::pair<BoundingBox, CandidatePatch>> out;
    out.reserve(boxes.size());
    for (const BoundingBox& box : boxes)
        out.emplace_back(box, crop_resize(frame, box, cfg.patch_size));
    return out;
}

FrameResult detect_frame(const Image& frame, int frame_index, const RoadMaskSource& road_src,
                         const NetworkParams& params, const PipelineConfig& cfg,
                         const NetworkConfig& net_cfg) {
    if (frame.width < 1 || frame.height < 1)
        throw InvalidParameterError("pipeline.detect_frame: empty frame");

    FrameResult result;
    result.frame_index = frame_index;

    auto t0 = Clock::now();
    const BinaryMask road = mask_for_frame(road_src, frame_index, frame.width, frame.height);
    result.timings.segmask_us = elapsed_us(t0);

    const std::vector<BoundingBox> boxes = candidate_boxes(frame, road, cfg, &result.timings);
    result.candidate_count = static_cast<int>(boxes.size());

    t0 = Clock::now();
    result.detections.reserve(boxes.size());
    for (const BoundingBox& box : boxes) {
        const CandidatePatch patch = crop_resize(frame, box, cfg.patch_size);
        auto [logits, probs] = network_forward(patch.pixels, params, net_cfg);
        (void)logits;
        const double score = double(probs[1]);
        result.detections.push_back(Detection{
            box, score,
            score >= cfg.score_threshold ? DetectionLabel::Crack : DetectionLabel::Background});
    }
    result.timings.classify_us = elapsed_us(t0);
    return result;
}

namespace {

StageStats stats_of(std::vector<double> values) {
    StageStats s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    s.mean_us = sum / double(n);
    s.p50_us = values[std::min(n - 1, static_cast<std::size_t>(0.50 * double(n)))];
    s.p95_us = values[std::min(n - 1, static_cast<std::size_t>(0.95 * double(n)))];
    return s;
}

SequenceSummary summarize(const std::vector<FrameResult>& frames, double total_seconds) {
    SequenceSummary summary;
    summary.frames = static_cast<int>(frames.size());
    summary.total_seconds = total_seconds;
    summary.fps = (frames.empty() || total_seconds <= 0.0)
                      ? 0.0
                      : double(frames.size()) / total_seconds;
    std::vector<double> seg, edge, dil, comb, cont, cls;
    for (const FrameResult& f : frames) {
        seg.push_back(double(f.timings.segmask_us));
        edge.push_back(double(f.timings.edge_us));
        dil.push_back(double(f.timings.dilate_us));
        comb.push_back(double(f.timings.combine_us));
        cont.push_back(double(f.timings.contours_us));
        cls.push_back(double(f.timings.classify_us));
    }
    summary.segmask = stats_of(std::move(seg));
    summary.edge = stats_of(std::move(edge));
    summary.dilate = stats_of(std::move(dil));
    summary.combine = stats_of(std::move(comb));
    summary.contours = stats_of(std::move(cont));
    summary.classify = stats_of(std::move(cls));
    return summary;
}

}  // namespace

SequenceResult run_sequence(const FrameSource& source, int count, const RoadMaskSource& road_src,
                            const NetworkParams& params, const PipelineConfig& cfg,
                            const NetworkConfig& net_cfg, int threads) {
    if (count < 0)
        throw InvalidParameterError("pipeline.run_sequence: negative frame count");

    SequenceResult result;
    result.frames.resize(static_cast<std::size_t>(count));
    const auto start = Clock::now();

    auto process = [&](int index) {
        Image frame;
        try {
            frame = source(index);
        } catch (const std::exception& e) {
            throw Error("pipeline.run_sequence: frame " + std::to_string(index) + ": " + e.what());
        }
        result.frames[static_cast<std::size_t>(index)] =
            detect_frame(frame, index, road_src, params, cfg, net_cfg);
    };

    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) process(i);
    } else {
        std::atomic<int> next{0};
        std::atomic<bool> failed{false};
        std::mutex error_mutex;
        std::exception_ptr first_error;
        int first_error_index = count;

        auto worker = [&]() {
            while (!failed.load(std::memory_order_relaxed)) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) break;
                try {
                    process(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (i < first_error_index) {
                        first_error_index = i;
                        first_error = std::current_exception();
                    }
                    failed.store(true, std::memory_order_relaxed);
                }
            }
        };
        std::vector<std::thread> pool;
        const int n_workers = std::min(threads, count);
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    const double total_seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    result.summary = summarize(result.frames, total_seconds);
    return result;
}

Image render_overlay(const Image& frame, const FrameResult& result) {
    Image out = Image::make(frame.width, frame.height, 3);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = frame.channels == 1 ? frame.at(x, y) : frame.at(x, y, c);
        }
    }
    for (const Detection& det : result.detections) {
        if (det.label != DetectionLabel::Crack) continue;
        const BoundingBox& b = det.box;
        for (int y = b.y; y < b.bottom(); ++y) {
            for (int x = b.x; x < b.right(); ++x) {
                const bool ring = x < b.x + 2 || x >= b.right() - 2 || y < b.y + 2 ||
                                  y >= b.bottom() - 2;
                if (!ring) continue;
                out.at(x, y, 0) = 255;
                out.at(x, y, 1) = 0;
                out.at(x, y, 2) = 0;
            }
        }
    }
    return out;
}

void write_detections_csv(const std::string& path, const std::vector<FrameResult>& results) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw NotFoundError("pipeline.write_detections_csv: cannot open " + path);
    out << "frame,x,y,w,h,score,label\n";

    struct Row {
        int frame;
        Detection det;
    };
    std::vector<Row> rows;
    for (const FrameResult& fr : results)
        for (const Detection& det : fr.detections) rows.push_back({fr.frame_index, det});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.frame != b.frame) return a.frame < b.frame;
        if (a.det.box.y != b.det.box.y) return a.det.box.y < b.det.box.y;
        return a.det.box.x < b.det.box.x;
    });
    char line[160];
    for (const Row& r : rows) {
        std::snprintf(line, sizeof(line), "%d,%d,%d,%d,%d,%.6f,%s\n", r.frame, r.det.box.x,
                      r.det.box.y, r.det.box.w, r.det.box.h, r.det.score,
                      to_string(r.det.label));
        out << line;
    }
}

std::string timing_summary_csv(const SequenceSummary& summary) {
    char line[128];
    std::string csv = "stage,mean_us,p50_us,p95_us\n";
    const std::pair<const char*, const StageStats*> rows[] = {
        {"segmask", &summary.segmask}, {"edge", &summary.edge},
        {"dilate", &summary.dilate},   {"combine", &summary.combine},
        {"contours", &summary.contours}, {"classify", &summary.classify}};
    for (const auto& [name, stats] : rows) {
        std::snprintf(line, sizeof(line), "%s,%.1f,%.1f,%.1f\n", name, stats->mean_us,
                      stats->p50_us, stats->p95_us);
        csv += line;
    }
    return csv;
}

}  // namespace crackpot

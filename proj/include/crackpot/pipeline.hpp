#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "crackpot/image.hpp"
#include "crackpot/imgproc.hpp"
#include "crackpot/network.hpp"
#include "crackpot/roadmask.hpp"

namespace crackpot {

struct PipelineConfig {
    int canny_low = 50;
    int canny_high = 150;
    int dilate_iterations = 3;
    int min_area = 80;
    int patch_size = 64;
    double score_threshold = 0.5;  // theta
    int max_candidates = 64;

    void validate() const {
        if (canny_low >= canny_high)
            throw InvalidParameterError("pipeline.PipelineConfig: canny_low must be < canny_high");
        if (score_threshold < 0.0 || score_threshold > 1.0)
            throw InvalidParameterError("pipeline.PipelineConfig: score_threshold must be in [0,1]");
        if (max_candidates < 1)
            throw InvalidParameterError("pipeline.PipelineConfig: max_candidates must be >= 1");
        if (dilate_iterations < 0 || min_area < 1 || patch_size < 1)
            throw InvalidParameterError("pipeline.PipelineConfig: non-positive stage parameter");
    }
};

enum class DetectionLabel { Background, Crack };

inline const char* to_string(DetectionLabel label) {
    return label == DetectionLabel::Crack ? "crack" : "background";
}

// One classified candidate. label == Crack exactly when score >= theta.
struct Detection {
    BoundingBox box;
    double score = 0.0;  // crack-class probability
    DetectionLabel label = DetectionLabel::Background;
};

struct StageTimings {
    std::int64_t segmask_us = 0;
    std::int64_t edge_us = 0;      // grayscale + Canny
    std::int64_t dilate_us = 0;
    std::int64_t combine_us = 0;   // road AND edges
    std::int64_t contours_us = 0;  // component boxes + truncation
    std::int64_t classify_us = 0;  // crop/resize + network, all candidates
};

struct FrameResult {
    int frame_index = 0;
    std::vector<Detection> detections;  // every classified candidate, (y, x) order
    int candidate_count = 0;
    StageTimings timings;
};

// Candidate generation: road mask AND dilated Canny edges -> component boxes
// (largest-area max_candidates kept) -> patches cropped from the original
// frame and resized to patch_size.
std::vector<std::pair<BoundingBox, CandidatePatch>> generate_candidates(
    const Image& frame, const BinaryMask& road, const PipelineConfig& cfg);

// Full per-frame pass with stage timings.
FrameResult detect_frame(const Image& frame, int frame_index, const RoadMaskSource& road_src,
                         const NetworkParams& params, const PipelineConfig& cfg,
                         const NetworkConfig& net_cfg);

struct StageStats {
    double mean_us = 0.0;
    double p50_us = 0.0;
    double p95_us = 0.0;
};

struct SequenceSummary {
    int frames = 0;
    double total_seconds = 0.0;
    double fps = 0.0;
    StageStats segmask, edge, dilate, combine, contours, classify;
};

struct SequenceResult {
    std::vector<FrameResult> frames;
    SequenceSummary summary;
};

// Produces the frame with the given index; called at most once per index.
using FrameSource = std::function<Image(int)>;

// Processes `count` frames. threads <= 1 runs the deterministic sequential
// mode; otherwise frames are distributed over a worker pool and results are
// emitted in input order regardless. A frame decode/processing failure stops
// the run with an error naming the frame index.
SequenceResult run_sequence(const FrameSource& source, int count, const RoadMaskSource& road_src,
                            const NetworkParams& params, const PipelineConfig& cfg,
                            const NetworkConfig& net_cfg, int threads = 1);

// Crack-labeled boxes drawn as 2-pixel red rectangles on the (channel-
// expanded) frame; background candidates are not drawn.
Image render_overlay(const Image& frame, const FrameResult& result);

// UTF-8 CSV `frame,x,y,w,h,score,label`, score with 6 decimals, rows sorted
// by (frame, y, x).
void write_detections_csv(const std::string& path, const std::vector<FrameResult>& results);

// CSV `stage,mean_us,p50_us,p95_us` over the six pipeline stages.
std::string timing_summary_csv(const SequenceSummary& summary);

}  // namespace crackpot

#pragma once

#include <string>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

// Detection records: one per line,
//   frame x y w h conf e0 .. e{D-1} f0 .. f31
// Embeddings are re-normalized to unit norm on read; records are sorted by
// frame with intra-frame order preserved.
std::vector<FaceVector> read_detections(const std::string& path, int embedding_dim);
void write_detections(const std::string& path, const std::vector<FaceVector>& dets);

// Candidate records mirror detections with a feat32-only payload:
//   frame x y w h score f0 .. f31
std::vector<Candidate> read_candidates(const std::string& path);
void write_candidates(const std::string& path, const std::vector<Candidate>& cands);

// Annotations: comma-separated lines
//   frame,person_id,x,y,w,h,is_streamer,over_pixelation
AnnotationSet read_annotations(const std::string& path);
void write_annotations(const std::string& path, const AnnotationSet& ann);

// Output boxes: comma-separated lines  frame,person_id,x,y,w,h
std::vector<OutputBox> read_output_boxes(const std::string& path);
void write_output_boxes(const std::string& path, const std::vector<OutputBox>& boxes);

// Bare feature-vector rows (32 numbers per line), used by the elr-test CLI.
std::vector<std::vector<double>> read_feature_rows(const std::string& path);
void write_feature_rows(const std::string& path, const std::vector<std::vector<double>>& rows);

}  // namespace facepix

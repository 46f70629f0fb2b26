#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "palm/types.h"

namespace palm::relevance {

enum class TokenizeMode {
  word,        // split on whitespace/punctuation, lowercase; a CJK run is one token
  cjk_bigram,  // character bigrams over every CJK run, words elsewhere
  auto_detect  // bigrams for Han/Kana runs, whole tokens for Hangul runs
};

std::optional<TokenizeMode> tokenize_mode_from_string(std::string_view s);
const char* to_string(TokenizeMode m);

std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode);

/// Sparse TF-IDF vector. Terms are kept sorted so every reduction over a
/// vector runs in the same order.
struct DocumentVector {
  std::string course_id;
  std::vector<std::pair<std::string, double>> weights;  // sorted by term, all > 0

  double weight(std::string_view term) const;
  bool empty() const { return weights.empty(); }
};

struct TfidfOptions {
  TokenizeMode mode = TokenizeMode::auto_detect;
  std::set<std::string> stop_words;  // empty by default
};

/// weight(t,d) = count(t,d) * ln(N / df(t)). Terms present in every document
/// get weight 0 and are dropped. Throws std::invalid_argument on an empty corpus.
/// (course_id, text) pairs.
using Corpus = std::vector<std::pair<std::string, std::string>>;

std::vector<DocumentVector> build_tfidf(const Corpus& corpus, const TfidfOptions& options = {});

/// Syllabus text used for a course: overview followed by the lecture plan.
std::string syllabus_text(const Course& course);
std::vector<DocumentVector> build_tfidf(const CurriculumLayout& layout,
                                        const TfidfOptions& options = {});

/// dot(u,v) / (|u| |v|), clamped to [0,1]; 0 when either vector is empty.
double cosine_similarity(const DocumentVector& u, const DocumentVector& v);

struct RenderPolicy {
  double min_similarity = 0.2;
  std::optional<std::size_t> top_k;

  bool operator==(const RenderPolicy&) const = default;
};

/// Undirected edge, stored once with course_a < course_b.
struct RelevanceEdge {
  std::string course_a;
  std::string course_b;
  double similarity = 0.0;

  bool operator==(const RelevanceEdge&) const = default;
};

struct RelevanceGraph {
  std::vector<RelevanceEdge> edges;  // similarity desc, then (a, b)
  RenderPolicy policy;

  bool operator==(const RelevanceGraph&) const = default;
};

RelevanceGraph build_graph(const std::vector<DocumentVector>& vectors, const RenderPolicy& policy);

/// Line thickness in [0,1]: (s - tau) / (1 - tau), clamped.
double thickness_for(double similarity, const RenderPolicy& policy);

/// `{policy:{min_similarity,top_k}, edges:[{a,b,similarity,thickness}]}`
std::string graph_to_json(const RelevanceGraph& graph);
RelevanceGraph graph_from_json(std::string_view bytes);

}  // namespace palm::relevance

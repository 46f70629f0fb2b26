#include "palm/relevance.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "palm/text_util.h"

namespace palm::relevance {

namespace {

enum class CharClass { separator, word, han_kana, hangul };

bool in(char32_t c, char32_t lo, char32_t hi) { return c >= lo && c <= hi; }

CharClass classify(char32_t c) {
  if (c < 0x80) {
    bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    return alnum ? CharClass::word : CharClass::separator;
  }
  if (in(c, 0x3400, 0x4DBF) || in(c, 0x4E00, 0x9FFF) || in(c, 0xF900, 0xFAFF) ||
      in(c, 0x20000, 0x2FFFF) || in(c, 0x3040, 0x309F) || in(c, 0x30A0, 0x30FF) ||
      in(c, 0xFF66, 0xFF9F))
    return CharClass::han_kana;
  if (in(c, 0xAC00, 0xD7AF) || in(c, 0x1100, 0x11FF) || in(c, 0x3130, 0x318F))
    return CharClass::hangul;
  if (in(c, 0x80, 0xBF) || c == 0xD7 || c == 0xF7 || in(c, 0x2000, 0x206F) ||
      in(c, 0x3000, 0x303F) || in(c, 0xFF01, 0xFF0F) || in(c, 0xFF1A, 0xFF20) ||
      in(c, 0xFF3B, 0xFF40) || in(c, 0xFF5B, 0xFF65) || c == 0xFFFD || c == 0xFEFF)
    return CharClass::separator;
  return CharClass::word;
}

char32_t fold(char32_t c) {
  // Full-width ASCII letters and digits fold onto their ASCII forms.
  if (in(c, 0xFF10, 0xFF19) || in(c, 0xFF21, 0xFF3A) || in(c, 0xFF41, 0xFF5A)) c -= 0xFEE0;
  if (in(c, 'A', 'Z')) return c + 0x20;
  if ((in(c, 0xC0, 0xDE) && c != 0xD7)) return c + 0x20;
  return c;
}

void emit_run(const std::vector<char32_t>& run, CharClass cls, TokenizeMode mode,
              std::vector<std::string>& out) {
  if (run.empty()) return;
  bool bigram = cls == CharClass::han_kana
                    ? mode != TokenizeMode::word
                    : cls == CharClass::hangul && mode == TokenizeMode::cjk_bigram;
  if (!bigram || run.size() == 1) {
    std::string tok;
    for (char32_t c : run) text::append_utf8(tok, c);
    out.push_back(std::move(tok));
    return;
  }
  for (std::size_t i = 0; i + 1 < run.size(); ++i) {
    std::string tok;
    text::append_utf8(tok, run[i]);
    text::append_utf8(tok, run[i + 1]);
    out.push_back(std::move(tok));
  }
}

}  // namespace

std::optional<TokenizeMode> tokenize_mode_from_string(std::string_view s) {
  if (s == "word") return TokenizeMode::word;
  if (s == "cjk_bigram") return TokenizeMode::cjk_bigram;
  if (s == "auto") return TokenizeMode::auto_detect;
  return std::nullopt;
}

const char* to_string(TokenizeMode m) {
  switch (m) {
    case TokenizeMode::word: return "word";
    case TokenizeMode::cjk_bigram: return "cjk_bigram";
    case TokenizeMode::auto_detect: return "auto";
  }
  return "?";
}

std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode) {
  std::vector<std::string> out;
  std::vector<char32_t> run;
  CharClass run_class = CharClass::separator;
  for (char32_t raw : text::decode_utf8(text)) {
    char32_t c = fold(raw);
    CharClass cls = classify(c);
    if (cls != run_class) {
      emit_run(run, run_class, mode, out);
      run.clear();
      run_class = cls;
    }
    if (cls != CharClass::separator) run.push_back(c);
  }
  emit_run(run, run_class, mode, out);
  return out;
}

double DocumentVector::weight(std::string_view term) const {
  auto it = std::lower_bound(weights.begin(), weights.end(), term,
                             [](const auto& p, std::string_view t) { return p.first < t; });
  return it != weights.end() && it->first == term ? it->second : 0.0;
}

std::vector<DocumentVector> build_tfidf(
    const std::vector<std::pair<std::string, std::string>>& corpus, const TfidfOptions& options) {
  if (corpus.empty()) throw std::invalid_argument("build_tfidf: empty corpus");

  std::vector<std::map<std::string, std::size_t>> counts(corpus.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (auto& tok : tokenize(corpus[d].second, options.mode))
      if (!options.stop_words.count(tok)) ++counts[d][std::move(tok)];
    for (const auto& [term, _] : counts[d]) ++df[term];
  }

  const double n_docs = static_cast<double>(corpus.size());
  std::vector<DocumentVector> out(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    out[d].course_id = corpus[d].first;
    for (const auto& [term, tf] : counts[d]) {
      std::size_t n = df[term];
      if (n == corpus.size()) continue;
      out[d].weights.emplace_back(term, static_cast<double>(tf) * std::log(n_docs / static_cast<double>(n)));
    }
  }
  return out;
}

std::string syllabus_text(const Course& course) {
  return course.overview_text + " " + course.lecture_plan_text;
}

std::vector<DocumentVector> build_tfidf(const CurriculumLayout& layout,
                                        const TfidfOptions& options) {
  std::vector<std::pair<std::string, std::string>> corpus;
  corpus.reserve(layout.courses.size());
  for (const auto& c : layout.courses) corpus.emplace_back(c.course_id, syllabus_text(c));
  return build_tfidf(corpus, options);
}

double cosine_similarity(const DocumentVector& u, const DocumentVector& v) {
  if (u.empty() || v.empty()) return 0.0;
  // Sorted merge: the summation order depends only on the term set, so
  // the result is exactly symmetric in (u, v).
  double dot = 0.0;
  auto a = u.weights.begin();
  auto b = v.weights.begin();
  while (a != u.weights.end() && b != v.weights.end()) {
    int cmp = a->first.compare(b->first);
    if (cmp == 0) {
      dot += a->second * b->second;
      ++a;
      ++b;
    } else if (cmp < 0) {
      ++a;
    } else {
      ++b;
    }
  }
  double nu = 0.0, nv = 0.0;
  for (const auto& [_, w] : u.weights) nu += w * w;
  for (const auto& [_, w] : v.weights) nv += w * w;
  double s = dot / std::sqrt(nu * nv);
  return std::clamp(s, 0.0, 1.0);
}

namespace {

bool edge_before(const RelevanceEdge& x, const RelevanceEdge& y) {
  if (x.similarity != y.similarity) return x.similarity > y.similarity;
  if (x.course_a != y.course_a) return x.course_a < y.course_a;
  return x.course_b < y.course_b;
}

}  // namespace

RelevanceGraph build_graph(const std::vector<DocumentVector>& vectors, const RenderPolicy& policy) {
  std::vector<const DocumentVector*> sorted;
  sorted.reserve(vectors.size());
  for (const auto& v : vectors) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* x, const auto* y) { return x->course_id < y->course_id; });

  std::vector<RelevanceEdge> kept;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if (sorted[i]->course_id == sorted[j]->course_id) continue;
      double s = cosine_similarity(*sorted[i], *sorted[j]);
      if (s >= policy.min_similarity)
        kept.push_back({sorted[i]->course_id, sorted[j]->course_id, s});
    }
  }
  std::sort(kept.begin(), kept.end(), edge_before);

  if (policy.top_k) {
    // An edge survives if it ranks within top_k for either endpoint. `kept`
    // is already in rank order, so the first k hits per course win.
    std::map<std::string, std::size_t> used;
    std::vector<RelevanceEdge> pruned;
    for (const auto& e : kept) {
      bool a_rank = used[e.course_a]++ < *policy.top_k;
      bool b_rank = used[e.course_b]++ < *policy.top_k;
      if (a_rank || b_rank) pruned.push_back(e);
    }
    kept = std::move(pruned);
  }
  return RelevanceGraph{std::move(kept), policy};
}

double thickness_for(double similarity, const RenderPolicy& policy) {
  const double tau = policy.min_similarity;
  if (tau >= 1.0) return similarity >= tau ? 1.0 : 0.0;
  return std::clamp((similarity - tau) / (1.0 - tau), 0.0, 1.0);
}

std::string graph_to_json(const RelevanceGraph& graph) {
  nlohmann::ordered_json doc;
  doc["policy"]["min_similarity"] = graph.policy.min_similarity;
  if (graph.policy.top_k)
    doc["policy"]["top_k"] = *graph.policy.top_k;
  else
    doc["policy"]["top_k"] = nullptr;
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) {
    nlohmann::ordered_json j;
    j["a"] = e.course_a;
    j["b"] = e.course_b;
    j["similarity"] = e.similarity;
    j["thickness"] = thickness_for(e.similarity, graph.policy);
    doc["edges"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

RelevanceGraph graph_from_json(std::string_view bytes) {
  auto doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  RelevanceGraph g;
  g.policy.min_similarity = doc.at("policy").at("min_similarity").get<double>();
  if (const auto& k = doc.at("policy").at("top_k"); !k.is_null()) g.policy.top_k = k.get<std::size_t>();
  for (const auto& e : doc.at("edges"))
    g.edges.push_back({e.at("a").get<std::string>(), e.at("b").get<std::string>(),
                       e.at("similarity").get<double>()});
  return g;
}

}  // namespace palm::relevance

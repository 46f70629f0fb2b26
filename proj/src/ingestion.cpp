#include "palm/ingestion.h"

#include <charconv>
#include <map>
#include <system_error>

#include "json.hpp"
#include "palm/text_util.h"

namespace palm::ingestion {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* to_string(RejectKind k) {
  switch (k) {
    case RejectKind::malformed_row: return "malformed_row";
    case RejectKind::out_of_range: return "out_of_range";
    case RejectKind::unknown_course: return "unknown_course";
    case RejectKind::unknown_letter: return "unknown_letter";
    case RejectKind::duplicate: return "duplicate";
  }
  return "?";
}

namespace {

std::string line_loc(std::size_t line) { return "line " + std::to_string(line); }

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
      was_quoted = false;
    } else if (c == '"' && cur.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ValidationError(line_loc(line_no), "unterminated quoted field");
  cells.push_back(std::move(cur));
  return cells;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& expected,
                   std::size_t optional_tail = 0) {
  const auto& h = t.header;
  bool ok = h.size() >= expected.size() - optional_tail && h.size() <= expected.size();
  for (std::size_t i = 0; ok && i < h.size(); ++i) ok = h[i] == expected[i];
  if (!ok) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw ValidationError("line 1", "unexpected header, want `" + want + "`");
  }
}

// ---- JSON helpers with path-tagged errors ----

std::pair<std::size_t, std::size_t> line_col(std::string_view bytes, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < bytes.size(); ++i) {
    if (bytes[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col(bytes, e.byte == 0 ? 0 : e.byte - 1);
    throw ValidationError("line " + std::to_string(line) + ", column " + std::to_string(col),
                          "malformed JSON");
  }
}

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "/" + key, "missing field");
  return *it;
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const auto& v = member(obj, path, key);
  if (!v.is_string()) throw ValidationError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

long long get_int(const json& obj, const std::string& path, const char* key) {
  const auto& v = member(obj, path, key);
  if (!v.is_number_integer()) throw ValidationError(path + "/" + key, "expected an integer");
  return v.get<long long>();
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const auto& v = member(obj, path, key);
  if (!v.is_number()) throw ValidationError(path + "/" + key, "expected a number");
  return v.get<double>();
}

std::vector<std::string> get_string_list(const json& obj, const std::string& path,
                                         const char* key) {
  const auto& v = member(obj, path, key);
  if (!v.is_array()) throw ValidationError(path + "/" + key, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string())
      throw ValidationError(path + "/" + key + "/" + std::to_string(i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::string_view bytes) {
  CsvTable t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= bytes.size()) {
    std::size_t end = bytes.find('\n', pos);
    if (end == std::string_view::npos) end = bytes.size();
    std::string_view line = bytes.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == bytes.size()) break;
      continue;
    }
    if (!have_header) {
      t.header = split_csv_line(line, line_no);
      if (!t.header.empty() && t.header[0].rfind("\xEF\xBB\xBF", 0) == 0)
        t.header[0].erase(0, 3);
      have_header = true;
    } else {
      t.rows.push_back({line_no, split_csv_line(line, line_no)});
    }
    if (end == bytes.size()) break;
  }
  if (!have_header) throw ValidationError("line 1", "missing header row");
  return t;
}

std::set<std::string> course_ids(const CurriculumLayout& layout) {
  std::set<std::string> ids;
  for (const auto& c : layout.courses) ids.insert(c.course_id);
  return ids;
}

// ---------------------------------------------------------------------------
// layout.json

CurriculumLayout parse_layout(std::string_view bytes) {
  json doc = parse_json(bytes);
  CurriculumLayout layout;
  layout.curriculum_id = get_string(doc, "", "curriculum_id");
  layout.rows = get_string_list(doc, "", "rows");
  layout.columns = get_string_list(doc, "", "columns");

  const auto& courses = member(doc, "", "courses");
  if (!courses.is_array()) throw ValidationError("/courses", "expected an array");

  const long long n_rows = static_cast<long long>(layout.rows.size());
  const long long n_cols = static_cast<long long>(layout.columns.size());
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < courses.size(); ++i) {
    const std::string path = "/courses/" + std::to_string(i);
    const json& c = courses[i];
    Course course;
    course.course_id = get_string(c, path, "course_id");
    if (course.course_id.empty()) throw ValidationError(path + "/course_id", "empty course_id");
    course.title = get_string(c, path, "title");
    long long sem = get_int(c, path, "semester_index");
    long long row = get_int(c, path, "objective_row");
    if (row < 0 || row >= n_rows)
      throw ValidationError(path + "/objective_row",
                            "out-of-grid: row " + std::to_string(row) + " not in [0," +
                                std::to_string(n_rows) + ")");
    if (sem < 0 || sem >= n_cols)
      throw ValidationError(path + "/semester_index",
                            "out-of-grid: column " + std::to_string(sem) + " not in [0," +
                                std::to_string(n_cols) + ")");
    course.objective_row = static_cast<int>(row);
    course.semester_index = static_cast<int>(sem);
    course.credits = get_number(c, path, "credits");
    if (course.credits < 0) throw ValidationError(path + "/credits", "credits must be >= 0");
    course.overview_text = get_string(c, path, "overview_text");
    course.lecture_plan_text = get_string(c, path, "lecture_plan_text");

    auto [it, inserted] = seen.emplace(course.course_id, i);
    if (!inserted)
      throw ValidationError(path + "/course_id", "duplicate course_id `" + course.course_id +
                                                     "` (first at /courses/" +
                                                     std::to_string(it->second) + ")");
    layout.courses.push_back(std::move(course));
  }

  if (auto it = doc.find("multi_cells"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("/multi_cells", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "/multi_cells/" + std::to_string(i);
      MultiCourseCell cell;
      cell.objective_row = static_cast<int>(get_int((*it)[i], path, "objective_row"));
      cell.semester_index = static_cast<int>(get_int((*it)[i], path, "semester_index"));
      cell.order = get_string_list((*it)[i], path, "order");
      layout.multi_cells.push_back(std::move(cell));
    }
  }

  // Cell occupancy: one course per cell unless declared as a multi-course cell
  // whose order lists exactly the courses placed there.
  std::map<std::pair<int, int>, std::vector<std::string>> occupancy;
  for (const auto& c : layout.courses)
    occupancy[{c.objective_row, c.semester_index}].push_back(c.course_id);
  std::map<std::pair<int, int>, std::size_t> declared;
  for (std::size_t i = 0; i < layout.multi_cells.size(); ++i) {
    const auto& cell = layout.multi_cells[i];
    const std::string path = "/multi_cells/" + std::to_string(i);
    if (!declared.emplace(std::pair{cell.objective_row, cell.semester_index}, i).second)
      throw ValidationError(path, "cell declared twice");
    std::set<std::string> listed(cell.order.begin(), cell.order.end());
    auto occ = occupancy[{cell.objective_row, cell.semester_index}];
    std::set<std::string> placed(occ.begin(), occ.end());
    if (listed.size() != cell.order.size() || listed != placed)
      throw ValidationError(path + "/order", "order must list exactly the courses in the cell");
  }
  for (const auto& [cell, ids] : occupancy) {
    if (ids.size() > 1 && !declared.count(cell))
      throw ValidationError("/courses/" + std::to_string(seen[ids[1]]),
                            "cell (" + std::to_string(cell.first) + "," +
                                std::to_string(cell.second) + ") already holds `" + ids[0] +
                                "`; declare it in multi_cells");
  }
  return layout;
}

std::string serialize_layout(const CurriculumLayout& layout) {
  ordered_json doc;
  doc["curriculum_id"] = layout.curriculum_id;
  doc["rows"] = layout.rows;
  doc["columns"] = layout.columns;
  doc["courses"] = ordered_json::array();
  for (const auto& c : layout.courses) {
    ordered_json j;
    j["course_id"] = c.course_id;
    j["title"] = c.title;
    j["semester_index"] = c.semester_index;
    j["objective_row"] = c.objective_row;
    j["credits"] = c.credits;
    j["overview_text"] = c.overview_text;
    j["lecture_plan_text"] = c.lecture_plan_text;
    doc["courses"].push_back(std::move(j));
  }
  if (!layout.multi_cells.empty()) {
    doc["multi_cells"] = ordered_json::array();
    for (const auto& m : layout.multi_cells) {
      ordered_json j;
      j["objective_row"] = m.objective_row;
      j["semester_index"] = m.semester_index;
      j["order"] = m.order;
      doc["multi_cells"].push_back(std::move(j));
    }
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// engagement.csv

CsvResult<EngagementRecord> parse_engagement_csv(std::string_view bytes,
                                                 const std::set<std::string>& known_courses) {
  const std::vector<std::string> header = {"student_id",   "course_id",
                                           "attendance_rate", "quiz_score",
                                           "assignment_submission_rate", "cohort_year",
                                           "max_score"};
  CsvTable t = read_csv(bytes);
  expect_header(t, header, 1);
  const bool has_max = t.header.size() == header.size();

  CsvResult<EngagementRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& row : t.rows) {
    auto reject = [&](RejectKind k, std::string msg) {
      out.rejects.push_back({row.line, k, std::move(msg)});
    };
    if (row.cells.size() != t.header.size()) {
      reject(RejectKind::malformed_row, "expected " + std::to_string(t.header.size()) +
                                            " cells, got " + std::to_string(row.cells.size()));
      continue;
    }
    EngagementRecord rec;
    rec.student_id = row.cells[0];
    rec.course_id = row.cells[1];
    if (rec.student_id.empty() || rec.course_id.empty()) {
      reject(RejectKind::malformed_row, "student_id and course_id are required");
      continue;
    }

    std::optional<double> max_score;
    if (has_max && !row.cells[6].empty()) {
      max_score = parse_double(row.cells[6]);
      if (!max_score || *max_score <= 0) {
        reject(RejectKind::malformed_row, "max_score must be a positive number");
        continue;
      }
    }

    bool bad = false;
    auto metric = [&](std::size_t col, bool scale_by_max) -> std::optional<double> {
      const std::string& cell = row.cells[col];
      if (cell.empty() || bad) return std::nullopt;
      auto v = parse_double(cell);
      if (!v) {
        reject(RejectKind::malformed_row, t.header[col] + " is not a number: `" + cell + "`");
        bad = true;
        return std::nullopt;
      }
      double x = scale_by_max && max_score ? *v / *max_score : *v;
      if (!(x >= 0.0 && x <= 1.0)) {
        reject(RejectKind::out_of_range, t.header[col] + " = " + cell + " outside [0,1]");
        bad = true;
        return std::nullopt;
      }
      return x;
    };
    rec.attendance_rate = metric(2, false);
    rec.quiz_score = metric(3, true);
    rec.assignment_submission_rate = metric(4, false);
    if (bad) continue;

    auto year = parse_int(row.cells[5]);
    if (!year) {
      reject(RejectKind::malformed_row, "cohort_year is not an integer: `" + row.cells[5] + "`");
      continue;
    }
    rec.cohort_year = static_cast<int>(*year);

    if (!known_courses.count(rec.course_id)) {
      reject(RejectKind::unknown_course, "unknown course_id `" + rec.course_id + "`");
      continue;
    }
    if (!seen.emplace(rec.student_id, rec.course_id).second) {
      reject(RejectKind::duplicate,
             "duplicate row for (" + rec.student_id + ", " + rec.course_id + ")");
      continue;
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

std::string serialize_engagement_csv(const std::vector<EngagementRecord>& records) {
  std::string out =
      "student_id,course_id,attendance_rate,quiz_score,assignment_submission_rate,cohort_year\n";
  auto num = [](const std::optional<double>& v) {
    return v ? text::format_double(*v) : std::string();
  };
  for (const auto& r : records) {
    out += csv_escape(r.student_id) + "," + csv_escape(r.course_id) + "," +
           num(r.attendance_rate) + "," + num(r.quiz_score) + "," +
           num(r.assignment_submission_rate) + "," + std::to_string(r.cohort_year) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// grade_scale.json / grades.csv

GradeScale parse_grade_scale(std::string_view bytes) {
  json doc = parse_json(bytes);
  GradeScale scale;
  scale.scale_name = get_string(doc, "", "scale_name");
  const auto& letters = member(doc, "", "letters");
  if (!letters.is_array() || letters.empty())
    throw ValidationError("/letters", "expected a non-empty array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const std::string path = "/letters/" + std::to_string(i);
    GradeLetter l;
    l.letter = get_string(letters[i], path, "letter");
    l.grade_point = get_number(letters[i], path, "grade_point");
    if (l.letter.empty()) throw ValidationError(path + "/letter", "empty letter");
    if (l.grade_point < 0) throw ValidationError(path + "/grade_point", "must be >= 0");
    if (!seen.insert(l.letter).second)
      throw ValidationError(path + "/letter", "duplicate letter `" + l.letter + "`");
    scale.letters.push_back(std::move(l));
  }
  return scale;
}

std::string serialize_grade_scale(const GradeScale& scale) {
  ordered_json doc;
  doc["scale_name"] = scale.scale_name;
  doc["letters"] = ordered_json::array();
  for (const auto& l : scale.letters)
    doc["letters"].push_back(ordered_json{{"letter", l.letter}, {"grade_point", l.grade_point}});
  return doc.dump(2) + "\n";
}

CsvResult<GradeRecord> parse_grades_csv(std::string_view bytes, const GradeScale& scale,
                                        const std::set<std::string>& known_courses) {
  CsvTable t = read_csv(bytes);
  expect_header(t, {"student_id", "course_id", "letter"});
  CsvResult<GradeRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& row : t.rows) {
    auto reject = [&](RejectKind k, std::string msg) {
      out.rejects.push_back({row.line, k, std::move(msg)});
    };
    if (row.cells.size() != 3) {
      reject(RejectKind::malformed_row, "expected 3 cells, got " + std::to_string(row.cells.size()));
      continue;
    }
    GradeRecord g{row.cells[0], row.cells[1], row.cells[2], 0.0};
    if (g.student_id.empty() || g.course_id.empty()) {
      reject(RejectKind::malformed_row, "student_id and course_id are required");
      continue;
    }
    auto gp = scale.grade_point(g.letter);
    if (!gp) {
      reject(RejectKind::unknown_letter,
             "letter `" + g.letter + "` not in scale `" + scale.scale_name + "`");
      continue;
    }
    g.grade_point = *gp;
    if (!known_courses.count(g.course_id)) {
      reject(RejectKind::unknown_course, "unknown course_id `" + g.course_id + "`");
      continue;
    }
    if (!seen.emplace(g.student_id, g.course_id).second) {
      reject(RejectKind::duplicate, "duplicate row for (" + g.student_id + ", " + g.course_id + ")");
      continue;
    }
    out.records.push_back(std::move(g));
  }
  return out;
}

std::string serialize_grades_csv(const std::vector<GradeRecord>& records) {
  std::string out = "student_id,course_id,letter\n";
  for (const auto& g : records)
    out += csv_escape(g.student_id) + "," + csv_escape(g.course_id) + "," + csv_escape(g.letter) +
           "\n";
  return out;
}

// ---------------------------------------------------------------------------
// survey.csv

SurveyParseResult parse_survey_csv(std::string_view bytes, const InstrumentDefinition& instrument) {
  CsvTable t = read_csv(bytes);
  std::vector<std::string> header = {"respondent_id", "phase"};
  auto items = instrument.item_ids();
  header.insert(header.end(), items.begin(), items.end());
  expect_header(t, header);

  SurveyParseResult out;
  auto& res = out.result;
  std::map<std::string, std::set<Phase>> phases;
  std::vector<std::string> first_seen;
  for (const auto& row : t.rows) {
    auto reject = [&](RejectKind k, std::string msg) {
      res.rejects.push_back({row.line, k, std::move(msg)});
    };
    if (row.cells.size() != header.size()) {
      reject(RejectKind::malformed_row, "expected " + std::to_string(header.size()) +
                                            " cells, got " + std::to_string(row.cells.size()));
      continue;
    }
    SurveyResponseSet s;
    s.respondent_id = row.cells[0];
    s.instrument_id = instrument.instrument_id;
    if (s.respondent_id.empty()) {
      reject(RejectKind::malformed_row, "respondent_id is required");
      continue;
    }
    if (row.cells[1] == "pre") {
      s.phase = Phase::pre;
    } else if (row.cells[1] == "post") {
      s.phase = Phase::post;
    } else {
      reject(RejectKind::malformed_row, "phase must be `pre` or `post`, got `" + row.cells[1] + "`");
      continue;
    }
    bool bad = false;
    for (std::size_t i = 0; i < items.size() && !bad; ++i) {
      const std::string& cell = row.cells[i + 2];
      auto v = parse_int(cell);
      if (!v) {
        reject(RejectKind::malformed_row, items[i] + " is not an integer: `" + cell + "`");
        bad = true;
      } else if (*v < instrument.likert_min || *v > instrument.likert_max) {
        reject(RejectKind::out_of_range, items[i] + " = " + cell + " outside {" +
                                             std::to_string(instrument.likert_min) + ".." +
                                             std::to_string(instrument.likert_max) + "}");
        bad = true;
      } else {
        s.answers.push_back({items[i], static_cast<int>(*v)});
      }
    }
    if (bad) continue;
    if (!phases.count(s.respondent_id)) first_seen.push_back(s.respondent_id);
    phases[s.respondent_id].insert(s.phase);
    res.records.push_back(std::move(s));
  }
  for (const auto& id : first_seen)
    if (phases[id].size() < 2) out.unpaired.push_back(id);
  return out;
}

std::string serialize_survey_csv(const std::vector<SurveyResponseSet>& responses,
                                 const InstrumentDefinition& instrument) {
  std::string out = "respondent_id,phase";
  for (const auto& id : instrument.item_ids()) out += "," + id;
  out += "\n";
  for (const auto& r : responses) {
    out += csv_escape(r.respondent_id) + "," + to_string(r.phase);
    for (const auto& a : r.answers) out += "," + std::to_string(a.value);
    out += "\n";
  }
  return out;
}

InstrumentDefinition parse_instrument(std::string_view bytes) {
  json doc = parse_json(bytes);
  InstrumentDefinition def;
  def.instrument_id = get_string(doc, "", "instrument_id");
  if (doc.contains("likert_min")) def.likert_min = static_cast<int>(get_int(doc, "", "likert_min"));
  if (doc.contains("likert_max")) def.likert_max = static_cast<int>(get_int(doc, "", "likert_max"));
  if (def.likert_min >= def.likert_max)
    throw ValidationError("/likert_max", "likert_max must exceed likert_min");
  const auto& factors = member(doc, "", "factors");
  if (!factors.is_array() || factors.empty())
    throw ValidationError("/factors", "expected a non-empty array");
  std::set<std::string> items;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const std::string path = "/factors/" + std::to_string(i);
    Factor f;
    f.name = get_string(factors[i], path, "name");
    f.item_ids = get_string_list(factors[i], path, "items");
    if (f.item_ids.empty()) throw ValidationError(path + "/items", "factor has no items");
    for (const auto& id : f.item_ids)
      if (!items.insert(id).second)
        throw ValidationError(path + "/items", "item `" + id + "` used twice");
    def.factors.push_back(std::move(f));
  }
  return def;
}

}  // namespace palm::ingestion

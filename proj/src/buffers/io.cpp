#include "prefrec/buffers/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>

#include "prefrec/errors.hpp"

namespace prefrec {

void append_float(std::string& out, double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
  out.append(buf, res.ptr);
}

namespace {

/// Walks one comma-separated record line, reporting errors with position.
class FieldReader {
 public:
  FieldReader(const std::string& line, const std::string& path, std::size_t line_no)
      : p_(line.data()), end_(line.data() + line.size()), path_(path), line_no_(line_no) {}

  std::int64_t read_int() {
    separator();
    std::int64_t v = 0;
    const auto res = std::from_chars(p_, end_, v);
    if (res.ec != std::errc()) fail("expected integer");
    p_ = res.ptr;
    return v;
  }

  float read_float() {
    separator();
    float v = 0.0f;
    const auto res = std::from_chars(p_, end_, v);
    if (res.ec != std::errc()) fail("expected number");
    p_ = res.ptr;
    return v;
  }

  double read_double() {
    separator();
    double v = 0.0;
    const auto res = std::from_chars(p_, end_, v);
    if (res.ec != std::errc()) fail("expected number");
    p_ = res.ptr;
    return v;
  }

  void done() {
    if (p_ != end_) fail("unexpected trailing fields");
  }

 private:
  void separator() {
    if (first_) {
      first_ = false;
      return;
    }
    if (p_ == end_ || *p_ != ',') fail("expected ','; record has too few fields");
    ++p_;
  }

  [[noreturn]] void fail(const char* what) {
    throw IoError(path_ + ":" + std::to_string(line_no_) + ": " + what);
  }

  const char* p_;
  const char* end_;
  const std::string& path_;
  std::size_t line_no_;
  bool first_ = true;
};

void append_vector(std::string& out, const std::vector<float>& v, bool leading_comma) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (leading_comma || i > 0) out.push_back(',');
    append_float(out, v[i]);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

}  // namespace

void save_transitions(const std::string& path, const ReplayBuffer& buffer) {
  std::ofstream out = open_out(path);
  out << "PREFREC-TRN v1 d_s=" << buffer.state_dim() << " d_a=" << buffer.action_dim() << "\n";
  std::string line;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const Transition& t = buffer.at(i);
    line.clear();
    line += std::to_string(t.user_id);
    line.push_back(',');
    line += std::to_string(t.session_index);
    line.push_back(',');
    line += std::to_string(t.request_index);
    append_vector(line, t.state, true);
    append_vector(line, t.action, true);
    append_vector(line, t.next_state, true);
    line.push_back('\n');
    out << line;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

ReplayBuffer load_transitions(const std::string& path, std::size_t capacity) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": missing header");
  int d_s = 0, d_a = 0;
  if (std::sscanf(line.c_str(), "PREFREC-TRN v1 d_s=%d d_a=%d", &d_s, &d_a) != 2 || d_s <= 0 ||
      d_a <= 0) {
    throw IoError(path + ":1: bad transition file header");
  }
  ReplayBuffer buffer(d_s, d_a, capacity);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    FieldReader fields(line, path, line_no);
    Transition t;
    t.user_id = fields.read_int();
    t.session_index = static_cast<std::int32_t>(fields.read_int());
    t.request_index = static_cast<std::int32_t>(fields.read_int());
    t.state.resize(static_cast<std::size_t>(d_s));
    for (float& x : t.state) x = fields.read_float();
    t.action.resize(static_cast<std::size_t>(d_a));
    for (float& x : t.action) x = fields.read_float();
    t.next_state.resize(static_cast<std::size_t>(d_s));
    for (float& x : t.next_state) x = fields.read_float();
    fields.done();
    buffer.push(std::move(t));
  }
  return buffer;
}

void save_preferences(const std::string& path, const PreferenceBuffer& buffer) {
  std::ofstream out = open_out(path);
  out << "PREFREC-PRF v1 d_s=" << buffer.state_dim() << " d_a=" << buffer.action_dim()
      << " T=" << buffer.segment_length() << "\n";
  std::string line;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const PreferenceRecord& r = buffer.at(i);
    for (const TrajectorySegment* seg : {&r.seg0, &r.seg1}) {
      for (const auto& step : seg->steps) {
        line.clear();
        append_vector(line, step.state, false);
        append_vector(line, step.action, true);
        line.push_back('\n');
        out << line;
      }
    }
    line.clear();
    append_float(line, r.y0);
    line.push_back(',');
    append_float(line, r.y1);
    line.push_back('\n');
    out << line;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

PreferenceBuffer load_preferences(const std::string& path, std::size_t capacity) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": missing header");
  int d_s = 0, d_a = 0, t_len = 0;
  if (std::sscanf(line.c_str(), "PREFREC-PRF v1 d_s=%d d_a=%d T=%d", &d_s, &d_a, &t_len) != 3 ||
      d_s <= 0 || d_a <= 0 || t_len <= 0) {
    throw IoError(path + ":1: bad preference file header");
  }
  PreferenceBuffer buffer(d_s, d_a, t_len, capacity);
  std::size_t line_no = 1;
  while (true) {
    PreferenceRecord rec;
    bool started = false;
    for (TrajectorySegment* seg : {&rec.seg0, &rec.seg1}) {
      seg->steps.resize(static_cast<std::size_t>(t_len));
      for (auto& step : seg->steps) {
        if (!std::getline(in, line)) {
          if (!started) return buffer;
          throw IoError(path + ":" + std::to_string(line_no) + ": truncated preference record");
        }
        ++line_no;
        started = true;
        FieldReader fields(line, path, line_no);
        step.state.resize(static_cast<std::size_t>(d_s));
        for (float& x : step.state) x = fields.read_float();
        step.action.resize(static_cast<std::size_t>(d_a));
        for (float& x : step.action) x = fields.read_float();
        fields.done();
      }
    }
    if (!std::getline(in, line)) {
      throw IoError(path + ":" + std::to_string(line_no) + ": missing label line");
    }
    ++line_no;
    FieldReader fields(line, path, line_no);
    rec.y0 = fields.read_double();
    rec.y1 = fields.read_double();
    fields.done();
    buffer.push(std::move(rec));
  }
}

}  // namespace prefrec

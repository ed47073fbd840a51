#pragma once

// Block text files for detections and ground truth.
//
//   <image id>          any non-empty line not starting with '#'
//   <k>                 box count, non-negative integer
//   k box lines         detections:   x y w h score
//                       ground truth: x y w h <subsets|-> <0|1>
//
// Boxes are written in corner+size form and held in corner form internally.
// Blank lines and lines starting with '#' between blocks are skipped.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "invnms/evaluation.hpp"
#include "invnms/suppression.hpp"

namespace invnms::io {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) {
      line = text_.substr(pos_);
      pos_ = text_.size();
    } else {
      line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
    }
    ++line_no_;
    return true;
  }
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline double parse_real(std::string_view tok, std::size_t line, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

inline std::size_t parse_count(std::string_view line, std::size_t line_no) {
  const std::vector<std::string_view> f = split_fields(line);
  std::size_t v = 0;
  if (f.size() == 1) {
    const auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), v);
    if (ec == std::errc() && ptr == f[0].data() + f[0].size()) return v;
  }
  throw ParseError(line_no, "malformed box count '" + std::string(line) + "'");
}

inline BoundingBox parse_xywh(const std::vector<std::string_view>& f, std::size_t line) {
  const double x = parse_real(f[0], line, "x");
  const double y = parse_real(f[1], line, "y");
  const double w = parse_real(f[2], line, "w");
  const double h = parse_real(f[3], line, "h");
  if (w < 0.0 || h < 0.0) throw ParseError(line, "negative box width or height");
  try {
    return BoundingBox::from_xywh(x, y, w, h);
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

inline bool is_skippable(std::string_view line) {
  return split_fields(line).empty() || line.front() == '#';
}

// Drives the block structure; `parse_box` turns one box line into a T.
template <typename T, typename ParseBox>
std::map<std::string, std::vector<T>> parse_blocks(std::string_view text, ParseBox parse_box) {
  std::map<std::string, std::vector<T>> out;
  LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    if (is_skippable(line)) continue;
    const std::size_t id_line = reader.line_no();
    std::string id(line);
    if (out.contains(id)) throw ParseError(id_line, "duplicate image id '" + id + "'");
    if (!reader.next(line)) throw ParseError(id_line + 1, "missing box count for image '" + id + "'");
    const std::size_t count = parse_count(line, reader.line_no());
    std::vector<T> items;
    items.reserve(std::min<std::size_t>(count, 1u << 16));
    for (std::size_t k = 0; k < count; ++k) {
      if (!reader.next(line)) {
        throw ParseError(reader.line_no() + 1, "expected " + std::to_string(count) +
                                                   " boxes for image '" + id + "', found " +
                                                   std::to_string(k));
      }
      items.push_back(parse_box(split_fields(line), reader.line_no(), k));
    }
    out.emplace(std::move(id), std::move(items));
  }
  return out;
}

// "%.6g" keeps six significant digits and always round-trips through from_chars.
inline void append_real(std::string& out, double v) {
  char buf[32];
  if (v == 0.0) v = 0.0;  // no "-0"
  std::snprintf(buf, sizeof buf, "%.6g", v);
  out += buf;
}

}  // namespace detail

/// `warnings`, when given, receives one message per score outside [0, 1].
inline DetectionsByImage parse_detections(std::string_view text,
                                          std::vector<std::string>* warnings = nullptr) {
  return detail::parse_blocks<Detection>(
      text, [&](const std::vector<std::string_view>& f, std::size_t line, std::size_t k) {
        if (f.size() != 5) {
          throw ParseError(line, "expected 5 fields 'x y w h score', got " + std::to_string(f.size()));
        }
        Detection d{detail::parse_xywh(f, line), detail::parse_real(f[4], line, "score"), k};
        if (warnings && (d.score < 0.0 || d.score > 1.0)) {
          warnings->push_back("line " + std::to_string(line) + ": score " + std::string(f[4]) +
                              " outside [0, 1]");
        }
        return d;
      });
}

inline SubsetTags parse_subsets(std::string_view tok, std::size_t line) {
  SubsetTags tags;
  if (tok == "-") return tags;
  std::size_t start = 0;
  while (start <= tok.size()) {
    std::size_t comma = tok.find(',', start);
    if (comma == std::string_view::npos) comma = tok.size();
    const std::string_view name = tok.substr(start, comma - start);
    bool found = false;
    for (Subset s : kAllSubsets) {
      if (subset_name(s) == name) {
        tags.set(s);
        found = true;
      }
    }
    if (!found) throw ParseError(line, "unknown subset '" + std::string(name) + "'");
    start = comma + 1;
  }
  return tags;
}

inline GroundTruthByImage parse_ground_truth(std::string_view text) {
  return detail::parse_blocks<GroundTruthBox>(
      text, [](const std::vector<std::string_view>& f, std::size_t line, std::size_t) {
        if (f.size() != 6) {
          throw ParseError(line, "expected 6 fields 'x y w h subsets ignore', got " +
                                     std::to_string(f.size()));
        }
        GroundTruthBox g;
        g.box = detail::parse_xywh(f, line);
        g.subsets = parse_subsets(f[4], line);
        if (f[5] == "0") {
          g.ignore = false;
        } else if (f[5] == "1") {
          g.ignore = true;
        } else {
          throw ParseError(line, "ignore flag must be 0 or 1, got '" + std::string(f[5]) + "'");
        }
        if (g.subsets.empty() && !g.ignore) {
          throw ParseError(line, "ground truth without subsets must be ignored");
        }
        return g;
      });
}

inline void check_image_id(const std::string& id) {
  if (id.empty() || id.front() == '#' || id.find('\n') != std::string::npos ||
      detail::split_fields(id).empty()) {
    throw std::invalid_argument("image id '" + id + "' cannot be written to a block file");
  }
}

/// Blocks in lexicographic id order; boxes in vector order.
inline std::string write_detections(const DetectionsByImage& dets) {
  std::string out;
  for (const auto& [id, list] : dets) {
    check_image_id(id);
    out += id;
    out += '\n';
    out += std::to_string(list.size());
    out += '\n';
    for (const Detection& d : list) {
      detail::append_real(out, d.box.x1());
      out += ' ';
      detail::append_real(out, d.box.y1());
      out += ' ';
      detail::append_real(out, d.box.width());
      out += ' ';
      detail::append_real(out, d.box.height());
      out += ' ';
      detail::append_real(out, d.score);
      out += '\n';
    }
  }
  return out;
}

inline std::string write_ground_truth(const GroundTruthByImage& gts) {
  std::string out;
  for (const auto& [id, list] : gts) {
    check_image_id(id);
    out += id;
    out += '\n';
    out += std::to_string(list.size());
    out += '\n';
    for (const GroundTruthBox& g : list) {
      detail::append_real(out, g.box.x1());
      out += ' ';
      detail::append_real(out, g.box.y1());
      out += ' ';
      detail::append_real(out, g.box.width());
      out += ' ';
      detail::append_real(out, g.box.height());
      out += ' ';
      std::string tags;
      for (Subset s : kAllSubsets) {
        if (!g.subsets.has(s)) continue;
        if (!tags.empty()) tags += ',';
        tags += subset_name(s);
      }
      out += tags.empty() ? "-" : tags;
      out += g.ignore ? " 1\n" : " 0\n";
    }
  }
  return out;
}

}  // namespace invnms::io

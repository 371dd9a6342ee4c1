// Copyright 2026 The SecPE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SECPE_DATA_HPP
#define SECPE_DATA_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "secpe/calibration.hpp"
#include "secpe/embedding.hpp"
#include "secpe/errors.hpp"

namespace secpe {

// Dataset ingestion, secret detection and embedding persistence.

struct Record {
  std::string id;
  std::string text;
  std::optional<std::string> label;
  std::vector<std::string> secrets;
};

struct Dataset {
  std::vector<Record> records;

  std::size_t size() const { return records.size(); }
  std::vector<std::string> texts() const {
    std::vector<std::string> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.text);
    return out;
  }
};

struct CatalogEntry {
  std::vector<std::string> keywords;
  std::optional<double> p;  // per-secret budget overrides
  std::optional<double> r;
};

// secret id -> keyword matcher, with optional per-secret budget overrides
struct SecretCatalog {
  std::map<std::string, CatalogEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// JSONL loader: one object per line, field "text" required, "id" defaults
// to the (1-based) line number, "label" and "secrets" optional.
inline Dataset load_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_jsonl: cannot open " + path);
  Dataset ds;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("load_jsonl: malformed JSON at " + path + ":" +
                    std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object() || !obj.contains("text") ||
        !obj["text"].is_string())
      throw IoError("load_jsonl: line " + std::to_string(line_no) +
                    " lacks a string \"text\" field");
    Record rec;
    rec.text = obj["text"].get<std::string>();
    rec.id = obj.contains("id") ? obj["id"].is_string()
                                      ? obj["id"].get<std::string>()
                                      : obj["id"].dump()
                                : std::to_string(line_no);
    if (obj.contains("label") && !obj["label"].is_null())
      rec.label = obj["label"].is_string() ? obj["label"].get<std::string>()
                                           : obj["label"].dump();
    if (obj.contains("secrets")) {
      if (!obj["secrets"].is_array())
        throw IoError("load_jsonl: line " + std::to_string(line_no) +
                      ": \"secrets\" must be an array");
      for (const auto& s : obj["secrets"])
        rec.secrets.push_back(s.get<std::string>());
    }
    if (!seen_ids.insert(rec.id).second)
      throw IoError("load_jsonl: duplicate id \"" + rec.id + "\" at line " +
                    std::to_string(line_no));
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

inline void write_jsonl(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_jsonl: cannot open " + path);
  for (const auto& r : ds.records) {
    nlohmann::json obj;
    obj["id"] = r.id;
    obj["text"] = r.text;
    if (r.label) obj["label"] = *r.label;
    obj["secrets"] = r.secrets;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("write_jsonl: write failed for " + path);
}

namespace detail {

// case-folded tokens split on non-alphanumeric runs
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      cur.push_back(static_cast<char>(std::tolower(ch)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

inline void detect_secrets_catalog(Dataset& ds, const SecretCatalog& catalog);

// Frequency-based secret designation: rank the vocabulary by descending
// corpus frequency (ties lexicographic), take `window` consecutive ranks
// starting at the nearest rank to the requested quantile, and annotate
// every record containing a designated word (whole-word, case-folded).
inline SecretCatalog detect_secrets_frequency(Dataset& ds, double quantile,
                                              std::size_t window) {
  if (!(quantile > 0.0 && quantile < 1.0))
    throw ValidationError("detect_secrets_frequency: quantile must be in (0,1)");
  if (window == 0)
    throw ValidationError("detect_secrets_frequency: window must be >= 1");

  std::map<std::string, std::size_t> freq;
  for (const auto& rec : ds.records)
    for (const auto& tok : detail::tokenize(rec.text)) ++freq[tok];
  if (freq.size() < window)
    throw ValidationError(
        "detect_secrets_frequency: vocabulary smaller than window (" +
        std::to_string(freq.size()) + " < " + std::to_string(window) + ")");

  std::vector<std::pair<std::string, std::size_t>> vocab(freq.begin(),
                                                         freq.end());
  std::sort(vocab.begin(), vocab.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  // nearest rank to quantile*(V-1); start may be pulled back so the whole
  // window fits
  std::size_t start = static_cast<std::size_t>(
      std::llround(quantile * static_cast<double>(vocab.size() - 1)));
  start = std::min(start, vocab.size() - window);

  SecretCatalog catalog;
  for (std::size_t i = 0; i < window; ++i)
    catalog.entries[vocab[start + i].first] = {{vocab[start + i].first},
                                               std::nullopt,
                                               std::nullopt};
  detect_secrets_catalog(ds, catalog);
  return catalog;
}

// Annotate records with the id of every catalog secret whose keyword list
// matches (whole-word, case-folded). Idempotent: existing annotations are
// merged, the result is sorted and duplicate-free.
inline void detect_secrets_catalog(Dataset& ds, const SecretCatalog& catalog) {
  if (catalog.empty())
    throw ValidationError("detect_secrets_catalog: catalog is empty");
  // keyword -> secret ids
  std::unordered_map<std::string, std::vector<const std::string*>> by_keyword;
  for (const auto& [id, entry] : catalog.entries) {
    if (entry.keywords.empty())
      throw ValidationError("detect_secrets_catalog: secret \"" + id +
                            "\" has no keywords");
    for (const auto& kw : entry.keywords) {
      std::string folded;
      for (unsigned char ch : kw)
        folded.push_back(static_cast<char>(std::tolower(ch)));
      by_keyword[folded].push_back(&id);
    }
  }
  for (auto& rec : ds.records) {
    std::set<std::string> ids(rec.secrets.begin(), rec.secrets.end());
    for (const auto& tok : detail::tokenize(rec.text)) {
      auto it = by_keyword.find(tok);
      if (it == by_keyword.end()) continue;
      for (const std::string* id : it->second) ids.insert(*id);
    }
    rec.secrets.assign(ids.begin(), ids.end());
  }
}

// SecretIndex over the records' annotations, ordered by catalog id.
inline SecretIndex build_secret_index(const Dataset& ds,
                                      const SecretCatalog& catalog) {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> membership;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& [id, entry] : catalog.entries) {
    slot[id] = names.size();
    names.push_back(id);
    membership.emplace_back();
  }
  for (std::size_t i = 0; i < ds.records.size(); ++i)
    for (const auto& sid : ds.records[i].secrets) {
      auto it = slot.find(sid);
      if (it != slot.end()) membership[it->second].push_back(i);
    }
  return SecretIndex(ds.records.size(), std::move(membership),
                     std::move(names));
}

// Catalog JSON: { "<secret id>": {"keywords": [...], "p": ..., "r": ...} }
inline SecretCatalog load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_catalog: cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load_catalog: malformed JSON in " + path + ": " + e.what());
  }
  if (!doc.is_object())
    throw IoError("load_catalog: top level must be an object");
  SecretCatalog catalog;
  for (const auto& [id, val] : doc.items()) {
    CatalogEntry entry;
    if (!val.is_object() || !val.contains("keywords") ||
        !val["keywords"].is_array() || val["keywords"].empty())
      throw IoError("load_catalog: secret \"" + id +
                    "\" needs a nonempty \"keywords\" array");
    for (const auto& kw : val["keywords"])
      entry.keywords.push_back(kw.get<std::string>());
    if (val.contains("p")) entry.p = val["p"].get<double>();
    if (val.contains("r")) entry.r = val["r"].get<double>();
    for (const auto& [key, ignored] : val.items())
      if (key != "keywords" && key != "p" && key != "r")
        throw IoError("load_catalog: unknown key \"" + key +
                      "\" in secret \"" + id + "\"");
    catalog.entries[id] = std::move(entry);
  }
  return catalog;
}

inline void write_catalog(const SecretCatalog& catalog,
                          const std::string& path) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [id, entry] : catalog.entries) {
    nlohmann::json e;
    e["keywords"] = entry.keywords;
    if (entry.p) e["p"] = *entry.p;
    if (entry.r) e["r"] = *entry.r;
    doc[id] = e;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_catalog: cannot open " + path);
  out << doc.dump(2) << '\n';
}

// Binary embedding format: 8-byte magic "SECPEMB1", then u32 little-endian
// n and d, then n*d float32 little-endian values, row-major.
inline constexpr char kEmbeddingMagic[8] = {'S', 'E', 'C', 'P',
                                            'E', 'M', 'B', '1'};

inline void write_embeddings(const EmbeddingSet& set, const std::string& path) {
  for (double v : set.data)
    if (!std::isfinite(v))
      throw ValidationError("write_embeddings: values must be finite");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_embeddings: cannot open " + path);
  out.write(kEmbeddingMagic, 8);
  auto put_u32 = [&](std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff),
                 static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
  };
  put_u32(static_cast<std::uint32_t>(set.n));
  put_u32(static_cast<std::uint32_t>(set.d));
  for (double v : set.data) {
    float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(bits);
  }
  if (!out) throw IoError("write_embeddings: write failed for " + path);
}

inline EmbeddingSet read_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_embeddings: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kEmbeddingMagic, 8) != 0)
    throw IoError("read_embeddings: bad magic in " + path);
  auto get_u32 = [&]() -> std::uint32_t {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IoError("read_embeddings: truncated file " + path);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  };
  std::uint32_t n = get_u32();
  std::uint32_t d = get_u32();
  if (d == 0) throw IoError("read_embeddings: zero dimension in " + path);
  EmbeddingSet set(n, d);
  for (std::size_t i = 0; i < set.data.size(); ++i) {
    std::uint32_t bits = get_u32();
    float f;
    std::memcpy(&f, &bits, 4);
    set.data[i] = static_cast<double>(f);
  }
  return set;
}

}  // namespace secpe

#endif  // SECPE_DATA_HPP

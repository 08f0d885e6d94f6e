#include "semloss/embeddings.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "semloss/errors.hpp"

namespace semloss {

namespace {

// True when every whitespace-separated field after the first parses as a
// finite double consuming the whole field.
bool fields_numeric(const std::vector<std::string>& fields, std::vector<double>* out) {
  out->clear();
  for (size_t i = 1; i < fields.size(); ++i) {
    const std::string& f = fields[i];
    char* end = nullptr;
    double v = std::strtod(f.c_str(), &end);
    if (end != f.c_str() + f.size() || !std::isfinite(v)) return false;
    out->push_back(v);
  }
  return true;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

}  // namespace

EmbeddingTable EmbeddingTable::load(const std::string& path,
                                    const std::unordered_set<std::string>* filter) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file: " + path);

  EmbeddingTable table;
  std::string line;
  long lineno = 0;
  bool first_content = true;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_ws(line);
    if (fields.empty()) continue;

    if (first_content) {
      first_content = false;
      // A fastText-style "count dim" header: exactly two integer fields.
      if (fields.size() == 2) {
        char* e1 = nullptr;
        char* e2 = nullptr;
        long a = std::strtol(fields[0].c_str(), &e1, 10);
        long b = std::strtol(fields[1].c_str(), &e2, 10);
        if (e1 == fields[0].c_str() + fields[0].size() &&
            e2 == fields[1].c_str() + fields[1].size() && a > 0 && b > 0) {
          continue;  // header, skip
        }
      }
    }

    if (fields.size() < 2 || !fields_numeric(fields, &vals)) {
      throw ParseError("embedding file " + path + " line " + std::to_string(lineno) +
                       ": expected 'token v1 ... vd'");
    }
    if (table.dim_ == 0) {
      table.dim_ = static_cast<long>(vals.size());
    } else if (static_cast<long>(vals.size()) != table.dim_) {
      throw ParseError("embedding file " + path + " line " + std::to_string(lineno) +
                       ": dimension " + std::to_string(vals.size()) + " != " +
                       std::to_string(table.dim_));
    }
    if (filter && !filter->count(fields[0])) continue;
    table.vectors_[fields[0]] = vals;
  }
  if (table.dim_ == 0) throw ParseError("embedding file " + path + ": no vectors found");
  return table;
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingTable::insert(const std::string& token, std::vector<double> vec) {
  if (dim_ == 0) dim_ = static_cast<long>(vec.size());
  if (static_cast<long>(vec.size()) != dim_) {
    throw ShapeError("embedding insert: dimension " + std::to_string(vec.size()) + " != " +
                     std::to_string(dim_));
  }
  vectors_[token] = std::move(vec);
}

SentenceEmbedding sentence_embedding(const std::vector<std::string>& tokens,
                                     const EmbeddingTable& table) {
  SentenceEmbedding out;
  out.vector.assign(static_cast<size_t>(table.dim()), 0.0);
  for (const std::string& tok : tokens) {
    if (Vocabulary::is_special_token(tok)) continue;
    ++out.total;
    const std::vector<double>* v = table.find(tok);
    if (!v) continue;
    ++out.covered;
    for (size_t i = 0; i < v->size(); ++i) out.vector[i] += (*v)[i];
  }
  if (out.covered > 0) {
    for (double& x : out.vector) x /= static_cast<double>(out.covered);
  }
  return out;
}

double semantic_distance(const std::vector<std::string>& a, const std::vector<std::string>& b,
                         const EmbeddingTable& table) {
  SentenceEmbedding ea = sentence_embedding(a, table);
  SentenceEmbedding eb = sentence_embedding(b, table);
  double acc = 0.0;
  for (size_t i = 0; i < ea.vector.size(); ++i) {
    double d = ea.vector[i] - eb.vector[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

Tensor init_input_embeddings(const Vocabulary& vocab, const EmbeddingTable& table, long model_dim,
                             Rng& rng, CoverageReport* report) {
  const long v = vocab.size();
  const long d = table.dim();
  Tensor emb({v, model_dim});
  const bool project = d != model_dim;

  // One projection matrix shared by every copied row, drawn before any row
  // noise so coverage does not shift the projection itself.
  Tensor proj({1, 1});
  if (project) {
    proj = Tensor({d, model_dim});
    double sd = 1.0 / std::sqrt(static_cast<double>(d));
    for (long i = 0; i < proj.size(); ++i) proj[i] = rng.normal(Stream::init) * sd;
  }

  CoverageReport cov;
  cov.total = v;
  cov.projected = project;
  for (long id = 0; id < v; ++id) {
    const std::string& tok = vocab.token(id);
    const std::vector<double>* vec = Vocabulary::is_special_token(tok) ? nullptr : table.find(tok);
    if (vec) {
      ++cov.covered;
      if (!project) {
        for (long j = 0; j < model_dim; ++j) emb.at(id, j) = (*vec)[static_cast<size_t>(j)];
      } else {
        for (long j = 0; j < model_dim; ++j) {
          double acc = 0.0;
          for (long k = 0; k < d; ++k) acc += (*vec)[static_cast<size_t>(k)] * proj.at(k, j);
          emb.at(id, j) = acc;
        }
      }
    } else {
      for (long j = 0; j < model_dim; ++j) emb.at(id, j) = rng.uniform(Stream::init) * 0.2 - 0.1;
    }
  }
  if (report) *report = cov;
  return emb;
}

}  // namespace semloss

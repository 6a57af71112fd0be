#include "uvg/prediction.hpp"

#include "uvg/error.hpp"

namespace uvg {

std::string to_string(PredictionKind k) {
  switch (k) {
    case PredictionKind::epsilon: return "epsilon";
    case PredictionKind::v: return "v";
    case PredictionKind::x0: return "x0";
  }
  return "?";
}

PredictionKind parse_prediction_kind(std::string_view s) {
  if (s == "epsilon") return PredictionKind::epsilon;
  if (s == "v") return PredictionKind::v;
  if (s == "x0") return PredictionKind::x0;
  throw InvalidArgument("unknown prediction kind '" + std::string(s) + "'");
}

ConditionTokens::ConditionTokens(std::vector<Array> s) : streams(std::move(s)), present(streams.size(), true) {
  for (const Array& a : streams) {
    if (a.rank() != 3) throw InvalidArgument("condition stream must be (B, K, d), got " + shape_string(a.shape()));
    if (a.dim(0) != streams[0].dim(0)) throw InvalidArgument("condition streams disagree on batch size");
  }
}

std::size_t ConditionTokens::batch() const { return streams.empty() ? 0 : streams[0].dim(0); }

void ConditionTokens::drop(std::size_t i) {
  streams.at(i).fill(0.0);
  present.at(i) = false;
}

void ConditionTokens::drop_rows(std::size_t i, const std::vector<bool>& rows) {
  Array& s = streams.at(i);
  if (rows.size() != s.dim(0)) throw InvalidArgument("drop mask length differs from batch size");
  for (std::size_t r = 0; r < rows.size(); ++r)
    if (rows[r])
      for (double& v : s.row(r)) v = 0.0;
}

ConditionTokens ConditionTokens::only(std::size_t keep) const {
  if (keep >= count()) throw InvalidArgument("stream index out of range");
  ConditionTokens out = *this;
  for (std::size_t i = 0; i < count(); ++i)
    if (i != keep) out.drop(i);
  return out;
}

ConditionTokens ConditionTokens::null() const {
  ConditionTokens out = *this;
  for (std::size_t i = 0; i < count(); ++i) out.drop(i);
  return out;
}

ConditionTokens ConditionTokens::with_present(const std::vector<bool>& mask) const {
  if (mask.size() != count()) throw InvalidArgument("presence mask length differs from stream count");
  ConditionTokens out = *this;
  for (std::size_t i = 0; i < count(); ++i)
    if (!mask[i]) out.drop(i);
  return out;
}

ConditionTokens ConditionTokens::slice_rows(std::size_t begin, std::size_t end) const {
  ConditionTokens out;
  out.present = present;
  for (const Array& a : streams) out.streams.push_back(a.slice_rows(begin, end));
  return out;
}

ConditionTokens ConditionTokens::repeat_rows(std::size_t n) const {
  ConditionTokens out;
  out.present = present;
  for (const Array& a : streams) {
    if (a.dim(0) != 1) throw InvalidArgument("repeat_rows expects a single-row token set");
    out.streams.push_back(stack_rows(std::vector<Array>(n, a.reshaped({a.dim(1), a.dim(2)}))));
  }
  return out;
}

}  // namespace uvg

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/text_io.hpp"

#include "angspoof/errors.hpp"

#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace angspoof {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    parts.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("precoder text line " + std::to_string(line_no) + ": bad number '" +
                          std::string(s) + "'");
  }
  return value;
}

}  // namespace

void write_precoders(std::ostream& out, const PrecoderSet& precoders) {
  const auto precision = out.precision();
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "shape," << precoders.measurements() << ',' << precoders.n_t() << ','
      << precoders.symbols() << '\n';
  for (std::size_t s = 0; s < precoders.measurements(); ++s) {
    const arma::cx_mat& f = precoders[s];
    for (arma::uword i = 0; i < f.n_rows; ++i) {
      for (arma::uword m = 0; m < f.n_cols; ++m) {
        out << f(i, m).real() << ',' << f(i, m).imag() << '\n';
      }
    }
  }
  out.precision(precision);
}

PrecoderSet read_precoders(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("precoder text is empty");
  const auto head = split(line);
  if (head.size() != 4 || head[0] != "shape") {
    throw InvalidArgument("precoder text must start with 'shape,S,N_t,M'");
  }
  const auto S = parse_number<std::size_t>(head[1], 1);
  const auto n_t = parse_number<std::size_t>(head[2], 1);
  const auto M = parse_number<std::size_t>(head[3], 1);
  if (S == 0 || n_t == 0 || M == 0) throw InvalidArgument("precoder shape must be positive");

  std::vector<arma::cx_mat> mats(S, arma::cx_mat(n_t, M));
  std::size_t line_no = 1;
  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t i = 0; i < n_t; ++i) {
      for (std::size_t m = 0; m < M; ++m) {
        ++line_no;
        if (!std::getline(in, line)) {
          throw InvalidArgument("precoder text ends early at line " + std::to_string(line_no));
        }
        const auto parts = split(line);
        if (parts.size() != 2) {
          throw InvalidArgument("precoder text line " + std::to_string(line_no) +
                                ": expected 're,im'");
        }
        mats[s](i, m) = cplx(parse_number<double>(parts[0], line_no),
                             parse_number<double>(parts[1], line_no));
      }
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty()) throw InvalidArgument("precoder text has trailing data");
  }
  return PrecoderSet(std::move(mats));
}

}  // namespace angspoof

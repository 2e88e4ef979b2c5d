// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_TEXT_IO_HPP
#define ANGSPOOF_TEXT_IO_HPP

#include "angspoof/channel_model.hpp"

#include <iosfwd>

namespace angspoof {

/// Precoder bank as text. First line `shape,S,N_t,M`, then one `re,im` line
/// per entry in row-major (s, i, m) order, printed with 17 significant
/// digits so that reading back is exact.
void write_precoders(std::ostream& out, const PrecoderSet& precoders);

/// Inverse of write_precoders. Throws InvalidArgument on malformed input.
PrecoderSet read_precoders(std::istream& in);

}  // namespace angspoof

#endif  // ANGSPOOF_TEXT_IO_HPP

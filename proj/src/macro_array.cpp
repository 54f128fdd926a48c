#include "cimmc/macro_array.hpp"

#include <sstream>
#include <stdexcept>

namespace cimmc {

MacroArray::MacroArray(int compartments, int rows, int cols, const FlipModel* flip_model,
                       PerfLedger* ledger)
    : compartments_(compartments),
      rows_(rows),
      cols_(cols),
      flip_model_(flip_model),
      ledger_(ledger) {
  if (compartments <= 0 || rows <= 0 || cols <= 0) {
    throw std::invalid_argument("array dimensions must be positive");
  }
  if (cols % kGroupWidth != 0) {
    throw std::invalid_argument("cols must be divisible by the group width");
  }
  if (flip_model_ == nullptr) {
    throw std::invalid_argument("flip model required");
  }
  cells_.assign(static_cast<std::size_t>(compartments) * rows * cols, 0);
}

std::size_t MacroArray::index(int c, int r, int col) const {
  return (static_cast<std::size_t>(c) * rows_ + r) * cols_ + col;
}

void MacroArray::check_span(const GroupAddr& addr, int n_bits) const {
  if (n_bits <= 0 || n_bits % kGroupWidth != 0) {
    throw std::invalid_argument("word length must be a positive multiple of 4");
  }
  if (n_bits > 64) throw std::invalid_argument("word length exceeds 64 bits");
  if (addr.compartment < 0 || addr.compartment >= compartments_ || addr.row < 0 ||
      addr.row >= rows_ || addr.group < 0 ||
      addr.group * kGroupWidth + n_bits > cols_) {
    throw std::out_of_range("group address out of bounds");
  }
}

void MacroArray::write(const GroupAddr& addr, std::uint64_t word, int n_bits) {
  check_span(addr, n_bits);
  const int base = addr.group * kGroupWidth;
  for (int b = 0; b < n_bits; ++b) {
    cells_[index(addr.compartment, addr.row, base + b)] =
        static_cast<std::uint8_t>((word >> b) & 1u);
  }
  if (ledger_) {
    for (int g = 0; g < n_bits / kGroupWidth; ++g) {
      ledger_->log(OpKind::Write, kGroupWidth, addr.compartment, energy_.e_write_fj,
                   timing_.t_write_ns);
    }
  }
}

std::uint64_t MacroArray::read(const GroupAddr& addr, int n_bits) {
  check_span(addr, n_bits);
  const int base = addr.group * kGroupWidth;
  std::uint64_t word = 0;
  for (int b = 0; b < n_bits; ++b) {
    word |= static_cast<std::uint64_t>(cells_[index(addr.compartment, addr.row, base + b)]) << b;
  }
  if (ledger_) {
    for (int g = 0; g < n_bits / kGroupWidth; ++g) {
      ledger_->log(OpKind::Read, kGroupWidth, addr.compartment, energy_.e_read_fj,
                   timing_.t_read_ns);
    }
  }
  return word;
}

std::uint64_t MacroArray::pseudo_read(const GroupAddr& addr, int n_bits, double cvdd,
                                      double temperature, RandomStream& rng) {
  check_span(addr, n_bits);
  const int base = addr.group * kGroupWidth;
  std::uint64_t word = 0;
  for (int b = 0; b < n_bits; ++b) {
    std::uint8_t& cell = cells_[index(addr.compartment, addr.row, base + b)];
    const double p = flip_model_->flip_prob(cell, cvdd, temperature);
    cell = static_cast<std::uint8_t>(flip_bit(cell, p, rng));
    word |= static_cast<std::uint64_t>(cell) << b;
  }
  if (ledger_) {
    // One WL assertion regardless of width; energy scales per group.
    for (int g = 0; g < n_bits / kGroupWidth; ++g) {
      ledger_->log(OpKind::PseudoRead, kGroupWidth, addr.compartment, energy_.e_random_fj,
                   g == 0 ? timing_.t_random_ns : 0.0);
    }
  }
  return word;
}

void MacroArray::copy(const GroupAddr& src, const GroupAddr& dst) {
  check_span(src, kGroupWidth);
  check_span(dst, kGroupWidth);
  if (src.compartment != dst.compartment || src.row != dst.row) {
    throw std::invalid_argument("in-memory copy is row-local; compose read+write instead");
  }
  if (src.group == dst.group) {
    throw std::invalid_argument("copy source and destination must differ");
  }
  for (int b = 0; b < kGroupWidth; ++b) {
    cells_[index(dst.compartment, dst.row, dst.group * kGroupWidth + b)] =
        cells_[index(src.compartment, src.row, src.group * kGroupWidth + b)];
  }
  if (ledger_) {
    ledger_->log(OpKind::Copy, kGroupWidth, src.compartment, energy_.e_copy_fj,
                 timing_.t_copy_ns);
  }
}

void MacroArray::copy_word(const GroupAddr& src, const GroupAddr& dst, int n_bits) {
  check_span(src, n_bits);
  check_span(dst, n_bits);
  // Separate transmission, one group at a time.
  for (int g = 0; g < n_bits / kGroupWidth; ++g) {
    copy({src.compartment, src.row, src.group + g}, {dst.compartment, dst.row, dst.group + g});
  }
}

void MacroArray::reset_zero(const GroupAddr& addr, int n_bits) {
  check_span(addr, n_bits);
  const int base = addr.group * kGroupWidth;
  for (int b = 0; b < n_bits; ++b) {
    cells_[index(addr.compartment, addr.row, base + b)] = 0;
  }
  if (ledger_) {
    // Reset energy is folded into the uRNG constant; logged for the trace.
    ledger_->log(OpKind::Reset, n_bits, addr.compartment, 0.0, 1.0);
  }
}

int MacroArray::bit(int compartment, int row, int col) const {
  if (compartment < 0 || compartment >= compartments_ || row < 0 || row >= rows_ || col < 0 ||
      col >= cols_) {
    throw std::out_of_range("cell index out of bounds");
  }
  return cells_[index(compartment, row, col)];
}

void MacroArray::set_bit(int compartment, int row, int col, int value) {
  if (compartment < 0 || compartment >= compartments_ || row < 0 || row >= rows_ || col < 0 ||
      col >= cols_) {
    throw std::out_of_range("cell index out of bounds");
  }
  cells_[index(compartment, row, col)] = static_cast<std::uint8_t>(value & 1);
}

std::uint64_t MacroArray::state_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t c : cells_) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string MacroArray::dump_hex() const {
  static const char* digits = "0123456789abcdef";
  std::ostringstream out;
  for (int c = 0; c < compartments_; ++c) {
    for (int r = 0; r < rows_; ++r) {
      for (int g = 0; g < groups_per_row(); ++g) {
        int nibble = 0;
        for (int b = 0; b < kGroupWidth; ++b) {
          nibble = (nibble << 1) | cells_[index(c, r, g * kGroupWidth + b)];
        }
        out << digits[nibble];
      }
      out << '\n';
    }
  }
  return out.str();
}

std::vector<std::uint8_t> MacroArray::dump_binary() const {
  std::vector<std::uint8_t> bytes((cells_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return bytes;
}

}  // namespace cimmc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cimmc/flip_model.hpp"
#include "cimmc/perf.hpp"
#include "cimmc/random_stream.hpp"

namespace cimmc {

// Address of one 4-bit column group.
struct GroupAddr {
  int compartment = 0;
  int row = 0;
  int group = 0;

  bool operator==(const GroupAddr&) const = default;
};

// Compartmentalized bitcell sub-array. Words are laid out across
// consecutive 4-bit column groups in one row, low bit in the lowest
// column. All primitive operations emit energy/latency events.
class MacroArray {
 public:
  static constexpr int kGroupWidth = 4;

  MacroArray(int compartments, int rows, int cols, const FlipModel* flip_model,
             PerfLedger* ledger = nullptr);

  static MacroArray with_defaults(const FlipModel* flip_model, PerfLedger* ledger = nullptr) {
    return MacroArray(64, 64, 64, flip_model, ledger);
  }

  int compartments() const { return compartments_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int groups_per_row() const { return cols_ / kGroupWidth; }

  // Word-level ops over n_bits/4 consecutive groups starting at addr.
  void write(const GroupAddr& addr, std::uint64_t word, int n_bits);
  std::uint64_t read(const GroupAddr& addr, int n_bits);

  // Destructive randomizing read: each selected bit independently flips
  // with the model probability at (cvdd, temperature). One timed event,
  // one energy event per 4-bit group.
  std::uint64_t pseudo_read(const GroupAddr& addr, int n_bits, double cvdd,
                            double temperature, RandomStream& rng);

  // Row-local bus copy. src and dst must share compartment and row.
  void copy(const GroupAddr& src, const GroupAddr& dst);
  void copy_word(const GroupAddr& src, const GroupAddr& dst, int n_bits);

  void reset_zero(const GroupAddr& addr, int n_bits);

  int bit(int compartment, int row, int col) const;
  void set_bit(int compartment, int row, int col, int value);

  // FNV-1a over the cell bytes in (compartment, row, col) order.
  std::uint64_t state_hash() const;

  // Hex text dump: one line per (compartment, row); within a line nibbles
  // run left to right over column groups, nibble MSB = lowest column.
  std::string dump_hex() const;
  std::vector<std::uint8_t> dump_binary() const;

  PerfLedger* ledger() const { return ledger_; }
  void set_ledger(PerfLedger* ledger) { ledger_ = ledger; }

 private:
  std::size_t index(int c, int r, int col) const;
  void check_span(const GroupAddr& addr, int n_bits) const;

  int compartments_;
  int rows_;
  int cols_;
  const FlipModel* flip_model_;
  PerfLedger* ledger_;
  EnergyConstants energy_;
  TimingConstants timing_;
  std::vector<std::uint8_t> cells_;

 public:
  void set_energy_constants(const EnergyConstants& e) { energy_ = e; }
  void set_timing_constants(const TimingConstants& t) { timing_ = t; }
  const EnergyConstants& energy_constants() const { return energy_; }
};

}  // namespace cimmc

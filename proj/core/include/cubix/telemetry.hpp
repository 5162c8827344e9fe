#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cubix/anchor.hpp"
#include "cubix/controller.hpp"
#include "cubix/dynamics.hpp"

namespace cubix {

/// Bumped whenever a column is added, removed or reordered.
inline constexpr int kTelemetryFormatVersion = 1;

/// Column names for a robot with `wires` wires, in file order.
std::vector<std::string> telemetry_columns(std::size_t wires);

/// One comma-separated row (no newline) for a tick and the true state it saw.
std::string telemetry_row(const ControlTick& tick, const SimState& state);

/// Writes telemetry rows on a background thread. `push` blocks while
/// `capacity` rows are pending. Destruction or `close` drains the queue, so
/// rows pushed before a fault always reach the file.
class TelemetryWriter {
 public:
  TelemetryWriter(const std::filesystem::path& path, std::size_t wires,
                  std::size_t capacity = 1024);
  ~TelemetryWriter();

  TelemetryWriter(const TelemetryWriter&) = delete;
  TelemetryWriter& operator=(const TelemetryWriter&) = delete;

  void push(const ControlTick& tick, const SimState& state);
  /// Drain, flush and stop the thread. Rethrows a write failure.
  void close();
  std::size_t rows_written() const;

 private:
  struct Record {
    ControlTick tick;
    SimState state;
  };

  void drain();

  std::ofstream out_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<Record> queue_;
  bool closing_ = false;
  bool closed_ = false;
  std::size_t written_ = 0;
  std::exception_ptr error_;
  std::thread worker_;
};

struct AnchorTrace {
  std::string pillar;
  int trial = 0;
  std::vector<DroneSample> samples;
};

/// Drone trajectories of the deployment phase, one row per sample.
void write_anchor_csv(const std::filesystem::path& path, const std::vector<AnchorTrace>& traces);

}  // namespace cubix

#include "cubix/telemetry.hpp"

#include "cubix/errors.hpp"
#include "cubix/units.hpp"

namespace cubix {

namespace {

using units::format_number;

void append(std::string& row, double v) {
  row += ',';
  row += format_number(v);
}

template <typename Derived>
void append(std::string& row, const Eigen::MatrixBase<Derived>& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) append(row, v.derived().coeff(i));
}

void append_pose(std::string& row, const Pose& p) {
  append(row, p.position);
  append(row, rotation_vector(p.orientation));
}

}  // namespace

std::vector<std::string> telemetry_columns(std::size_t wires) {
  std::vector<std::string> cols{"format_version", "tick", "t"};
  const auto add = [&](const std::string& suffix, std::initializer_list<const char*> names) {
    for (const char* n : names) cols.push_back(n + suffix);
  };
  add("", {"qx", "qy", "qz", "qrx", "qry", "qrz"});
  add("", {"vx", "vy", "vz", "wx", "wy", "wz"});
  add("_ref", {"qx", "qy", "qz", "qrx", "qry", "qrz"});
  add("_ref", {"vx", "vy", "vz", "wx", "wy", "wz"});
  add("", {"mx", "my", "mz", "mrx", "mry", "mrz"});
  add("_fb", {"Fx", "Fy", "Fz", "Mx", "My", "Mz"});
  add("_ref", {"Fx", "Fy", "Fz", "Mx", "My", "Mz"});
  cols.insert(cols.end(), {"residual", "saturated", "fault"});
  for (const char* prefix : {"f", "fref", "i", "sat", "T"}) {
    for (std::size_t k = 0; k < wires; ++k) cols.push_back(prefix + std::to_string(k));
  }
  return cols;
}

std::string telemetry_row(const ControlTick& tick, const SimState& state) {
  std::string row = std::to_string(kTelemetryFormatVersion);
  row += ',';
  row += std::to_string(tick.tick);
  append(row, tick.time);
  append_pose(row, state.pose);
  append(row, state.twist.as_vector());
  append_pose(row, tick.q_ref);
  append(row, tick.qdot_ref.as_vector());
  append_pose(row, tick.q);
  append(row, tick.w_fb.as_vector());
  append(row, tick.w_ref.as_vector());
  append(row, tick.residual_norm);
  row += ',' + std::to_string(tick.saturation_count());
  row += tick.fault ? ",1" : ",0";
  append(row, tick.f_final);
  append(row, tick.f_ref);
  append(row, tick.currents);
  for (const auto s : tick.saturated) row += s ? ",1" : ",0";
  if (state.tensions.size() == tick.f_ref.size()) {
    append(row, state.tensions);
  } else {
    for (Eigen::Index k = 0; k < tick.f_ref.size(); ++k) row += ",0";
  }
  return row;
}

TelemetryWriter::TelemetryWriter(const std::filesystem::path& path, std::size_t wires,
                                 std::size_t capacity)
    : out_(path), capacity_(capacity == 0 ? 1 : capacity) {
  if (!out_) throw Error("cannot open telemetry file " + path.string());
  const auto cols = telemetry_columns(wires);
  for (std::size_t k = 0; k < cols.size(); ++k) out_ << (k ? "," : "") << cols[k];
  out_ << '\n';
  worker_ = std::thread([this] { drain(); });
}

TelemetryWriter::~TelemetryWriter() {
  try {
    close();
  } catch (...) {
    // Already reported by an explicit close(), or nobody is left to tell.
  }
}

void TelemetryWriter::push(const ControlTick& tick, const SimState& state) {
  std::unique_lock lock(mutex_);
  not_full_.wait(lock, [&] { return queue_.size() < capacity_ || error_; });
  if (error_) std::rethrow_exception(error_);
  if (closing_) throw Error("telemetry writer already closed");
  queue_.push_back({tick, state});
  not_empty_.notify_one();
}

void TelemetryWriter::close() {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    closing_ = true;
  }
  not_empty_.notify_one();
  if (worker_.joinable()) worker_.join();
  out_.flush();
  std::lock_guard lock(mutex_);
  closed_ = true;
  if (error_) std::rethrow_exception(error_);
}

std::size_t TelemetryWriter::rows_written() const {
  std::lock_guard lock(mutex_);
  return written_;
}

void TelemetryWriter::drain() {
  while (true) {
    Record r;
    {
      std::unique_lock lock(mutex_);
      not_empty_.wait(lock, [&] { return !queue_.empty() || closing_; });
      if (queue_.empty()) return;
      r = std::move(queue_.front());
      queue_.pop_front();
    }
    not_full_.notify_one();
    try {
      out_ << telemetry_row(r.tick, r.state) << '\n';
      if (!out_) throw Error("telemetry write failed");
      std::lock_guard lock(mutex_);
      ++written_;
    } catch (...) {
      std::lock_guard lock(mutex_);
      error_ = std::current_exception();
      queue_.clear();
      not_full_.notify_all();
      return;
    }
  }
}

void write_anchor_csv(const std::filesystem::path& path, const std::vector<AnchorTrace>& traces) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << "format_version,pillar,trial,t,x,y,z,ex,ey,ez,tag_visible,waypoint\n";
  for (const auto& trace : traces) {
    for (const auto& s : trace.samples) {
      std::string row = std::to_string(kTelemetryFormatVersion) + ',' + trace.pillar + ',' +
                        std::to_string(trace.trial);
      append(row, s.time);
      append(row, s.position);
      append(row, s.estimate);
      row += s.tag_visible ? ",1," : ",0,";
      row += std::to_string(s.active_waypoint);
      out << row << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace cubix

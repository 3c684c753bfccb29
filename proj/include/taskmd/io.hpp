#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "taskmd/engine.hpp"
#include "taskmd/flat_config.hpp"
#include "taskmd/timers.hpp"

namespace taskmd {

// One XYZ frame: particle count, a comment line carrying the step and box,
// then one "type x y z" row per particle in the order of the snapshot.
inline void write_xyz_frame(std::ostream& os, const FlatConfig& f,
                            std::int64_t step) {
  os << f.size() << "\n";
  os << "step=" << step << " box=" << std::setprecision(17) << f.box.length.x
     << " " << f.box.length.y << " " << f.box.length.z << "\n";
  os << std::setprecision(10);
  for (std::size_t k = 0; k < f.size(); ++k) {
    os << f.type[k] << " " << f.pos[k].x << " " << f.pos[k].y << " "
       << f.pos[k].z << "\n";
  }
}

class TrajectoryWriter {
 public:
  explicit TrajectoryWriter(const std::string& path) : out_(path) {
    if (!out_) {
      throw ConfigError("cannot open trajectory file: " + path);
    }
  }

  void write(const FlatConfig& f, std::int64_t step) {
    write_xyz_frame(out_, f, step);
    frames_ += 1;
    if (!out_) throw ConfigError("trajectory write failed");
  }

  std::int64_t frames() const { return frames_; }

 private:
  std::ofstream out_;
  std::int64_t frames_ = 0;
};

// Line-delimited timing records: a CSV with (step_range, section, seconds)
// fields. In per-step mode one record per section per step is emitted; in
// summary mode only the footer appears. The footer always closes the file
// with per-section totals over the whole run plus the total elapsed time.
class TimingWriter {
 public:
  TimingWriter(const std::string& path, bool per_step)
      : out_(path), per_step_(per_step) {
    if (!out_) {
      throw ConfigError("cannot open timing file: " + path);
    }
    out_ << "step_range,section,seconds\n";
  }

  // Per-step section times (the difference of accumulated timers across
  // one step). No-op in summary mode.
  void record_step(std::int64_t step, const SectionTimers& delta) {
    if (!per_step_) return;
    const std::string range =
        std::to_string(step - 1) + "-" + std::to_string(step);
    for (std::size_t s = 0; s < kSectionCount; ++s) {
      out_ << range << "," << section_name(static_cast<Section>(s)) << ","
           << std::setprecision(9) << delta.seconds[s] << "\n";
    }
  }

  void finish(std::int64_t steps, const SectionTimers& totals) {
    const std::string range = "0-" + std::to_string(steps);
    for (std::size_t s = 0; s < kSectionCount; ++s) {
      out_ << range << "," << section_name(static_cast<Section>(s)) << ","
           << std::setprecision(9) << totals.seconds[s] << "\n";
    }
    out_ << range << ",Elapsed," << std::setprecision(9) << totals.elapsed
         << "\n";
    out_.flush();
    if (!out_) throw ConfigError("timing write failed");
  }

 private:
  std::ofstream out_;
  bool per_step_ = false;
};

// Autotune measurements as CSV, one probe per row, with the selected
// candidate flagged.
inline void write_autotune_csv(std::ostream& os, const AutotuneReport& r) {
  os << "n_sub,seconds,selected\n";
  for (const AutotuneProbe& p : r.probes) {
    os << p.n_sub << "," << std::setprecision(9) << p.seconds << ","
       << (p.n_sub == r.selected ? 1 : 0) << "\n";
  }
}

}  // namespace taskmd

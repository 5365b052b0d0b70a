#include "core/report_format.hpp"

#include <cmath>
#include <cstdio>

#include "core/error.hpp"

namespace dslr::report {

using perf::DesignReport;
using perf::PerfReport;

namespace {

constexpr int kSignificant = 9;

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += char(c);
        }
    }
  }
  return out + "\"";
}

// CSV fields are layer/network names; quote only when needed.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string integer(std::int64_t v) { return std::to_string(v); }

// Minimal JSON object writer keeping key order.
class Obj {
 public:
  Obj& str(const std::string& k, const std::string& v) { return raw(k, json_string(v)); }
  Obj& num(const std::string& k, double v) { return raw(k, decimal(v)); }
  Obj& num(const std::string& k, std::int64_t v) { return raw(k, integer(v)); }
  Obj& raw(const std::string& k, const std::string& v) {
    body_ += (body_.empty() ? "" : ",") + json_string(k) + ":" + v;
    return *this;
  }
  std::string done() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
};

std::string array(const std::vector<std::string>& items) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
  return s + "]";
}

std::vector<const DesignReport*> designs(const PerfReport& rep) {
  std::vector<const DesignReport*> d{&rep.dslr};
  if (rep.baseline) d.push_back(&*rep.baseline);
  return d;
}

std::string layer_json(const perf::LayerMetrics& m) {
  return Obj()
      .str("layer", m.layer)
      .num("cycles", m.cycles)
      .num("duration_ms", m.duration_ms)
      .num("ops", m.ops)
      .num("gops", m.gops)
      .num("tops_per_w", m.tops_per_w)
      .num("gops_per_mm2", m.gops_per_mm2)
      .num("oi", m.oi)
      .done();
}

std::string summary_json(const perf::DesignSummary& s) {
  return Obj()
      .num("total_cycles", s.total_cycles)
      .num("total_ms", s.total_ms)
      .num("mean_ms", s.mean_ms)
      .num("peak_gops", s.peak_gops)
      .num("peak_tops_per_w", s.peak_tops_per_w)
      .num("peak_gops_per_mm2", s.peak_gops_per_mm2)
      .done();
}

std::string hw_json(const perf::HwProfile& hw) {
  return Obj()
      .str("label", hw.label)
      .num("clock_mhz", hw.effective_clock_mhz())
      .num("power_mw", hw.effective_power_mw())
      .num("area_mm2", hw.area_mm2())
      .done();
}

std::string speedup_json(const PerfReport& rep) {
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < rep.layer_speedups.size(); ++i) {
    rows.push_back(Obj().str("layer", rep.dslr.layers[i].layer).num("speedup", rep.layer_speedups[i]).done());
  }
  return Obj().raw("layers", array(rows)).num("total", *rep.speedup).done();
}

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + s + "' (expected csv or json)");
}

std::string decimal(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::Range, "non-finite value in report");
  if (v == 0) v = 0;  // drop negative zero
  int frac = kSignificant - 1;
  if (v != 0) {
    const int mag = int(std::floor(std::log10(std::fabs(v))));
    frac = std::max(0, kSignificant - 1 - mag);
  }
  frac = std::min(frac, 40);
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", frac, v);
  return buf;
}

std::string render_report(const PerfReport& rep, Format fmt) {
  if (fmt == Format::Json) {
    std::vector<std::string> ds;
    for (const auto* d : designs(rep)) {
      std::vector<std::string> layers;
      for (const auto& m : d->layers) layers.push_back(layer_json(m));
      ds.push_back(Obj()
                       .str("design", d->design)
                       .raw("hardware", hw_json(d->hw))
                       .raw("layers", array(layers))
                       .raw("aggregate", summary_json(d->summary))
                       .done());
    }
    Obj root;
    root.str("network", rep.network).raw("designs", array(ds));
    if (rep.speedup) root.raw("speedup", speedup_json(rep));
    return root.done() + "\n";
  }

  std::string out = "design,layer,cycles,duration_ms,ops,gops,tops_per_w,gops_per_mm2,oi\n";
  for (const auto* d : designs(rep)) {
    for (const auto& m : d->layers) {
      out += d->design + "," + csv_field(m.layer) + "," + integer(m.cycles) + "," + decimal(m.duration_ms) +
             "," + integer(m.ops) + "," + decimal(m.gops) + "," + decimal(m.tops_per_w) + "," +
             decimal(m.gops_per_mm2) + "," + decimal(m.oi) + "\n";
    }
  }
  out += "\naggregate,design,total_cycles,total_ms,mean_ms,peak_gops,peak_tops_per_w,peak_gops_per_mm2\n";
  for (const auto* d : designs(rep)) {
    const auto& s = d->summary;
    out += "aggregate," + d->design + "," + integer(s.total_cycles) + "," + decimal(s.total_ms) + "," +
           decimal(s.mean_ms) + "," + decimal(s.peak_gops) + "," + decimal(s.peak_tops_per_w) + "," +
           decimal(s.peak_gops_per_mm2) + "\n";
  }
  if (rep.speedup) {
    out += "\nspeedup,layer,value\n";
    for (std::size_t i = 0; i < rep.layer_speedups.size(); ++i) {
      out += "speedup," + csv_field(rep.dslr.layers[i].layer) + "," + decimal(rep.layer_speedups[i]) + "\n";
    }
    out += "speedup,total," + decimal(*rep.speedup) + "\n";
  }
  return out;
}

std::string render_compare(const std::vector<PerfReport>& reps, Format fmt) {
  for (const auto& r : reps) {
    if (!r.baseline || !r.speedup) {
      throw Error(ErrorCode::InvalidArgument, "comparison needs a baseline for " + r.network);
    }
  }
  if (fmt == Format::Json) {
    std::vector<std::string> rows;
    for (const auto& r : reps) {
      rows.push_back(Obj()
                         .str("network", r.network)
                         .raw("dslr", summary_json(r.dslr.summary))
                         .raw("baseline", summary_json(r.baseline->summary))
                         .num("speedup", *r.speedup)
                         .done());
    }
    return Obj().raw("comparison", array(rows)).done() + "\n";
  }
  std::string out =
      "network,dslr_total_ms,baseline_total_ms,dslr_mean_ms,baseline_mean_ms,dslr_peak_gops,"
      "baseline_peak_gops,speedup\n";
  for (const auto& r : reps) {
    const auto& a = r.dslr.summary;
    const auto& b = r.baseline->summary;
    out += csv_field(r.network) + "," + decimal(a.total_ms) + "," + decimal(b.total_ms) + "," +
           decimal(a.mean_ms) + "," + decimal(b.mean_ms) + "," + decimal(a.peak_gops) + "," +
           decimal(b.peak_gops) + "," + decimal(*r.speedup) + "\n";
  }
  return out;
}

std::string render_roofline(const PerfReport& rep, Format fmt) {
  if (fmt == Format::Json) {
    std::vector<std::string> series;
    for (const auto* d : designs(rep)) {
      std::vector<std::string> pts;
      for (const auto& m : d->layers) {
        pts.push_back(Obj().str("layer", m.layer).num("oi", m.oi).num("gops", m.gops).done());
      }
      series.push_back(Obj().str("design", d->design).raw("points", array(pts)).done());
    }
    return Obj().str("network", rep.network).raw("series", array(series)).done() + "\n";
  }
  std::string out = "design,layer,oi,gops\n";
  for (const auto* d : designs(rep)) {
    for (const auto& m : d->layers) {
      out += d->design + "," + csv_field(m.layer) + "," + decimal(m.oi) + "," + decimal(m.gops) + "\n";
    }
  }
  return out;
}

}  // namespace dslr::report

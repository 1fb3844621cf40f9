#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "graphfx/dsp/process.hpp"
#include "graphfx/errors.hpp"
#include "graphfx/registry.hpp"
#include "graphfx/rng.hpp"

using namespace graphfx;
using Catch::Approx;

TEST_CASE("registry order is frozen") {
  const auto& r = Registry::instance();
  REQUIRE(r.specs().size() == static_cast<std::size_t>(kNumTypes));
  REQUIRE(kNumTypes == 41);
  const char* expected[] = {
      "in", "kick", "snare", "hat", "tom", "ride", "crash",
      "lowpass", "bandpass", "highpass", "bandreject", "lowpass4", "bandpass4", "highpass4",
      "lowshelf", "highshelf", "bell", "crossover", "phaser",
      "chorus", "flanger", "vibrato", "mono_delay", "pingpong_delay", "mono_reverb",
      "stereo_reverb", "distortion", "bitcrush", "compressor", "noisegate", "expander",
      "pitchshift", "mix", "panning", "imager", "ms_split", "ms_merge",
      "lfo", "stereo_lfo", "envelope_follower", "out"};
  for (int t = 0; t < kNumTypes; ++t) {
    CHECK(r.spec(t).name == expected[t]);
    CHECK(r.spec(t).type_id == t);
    CHECK(r.find(expected[t]) == t);
  }
  CHECK_FALSE(r.find("limiter"));
  // Sources plus 33 processors plus the sink.
  CHECK(kNumProcessors == 33);
}

TEST_CASE("task sources") {
  const auto& r = Registry::instance();
  auto singing = r.source_types(Task::singing);
  REQUIRE(singing.size() == 1);
  CHECK(singing[0] == id_of(Proc::in));
  auto drum = r.source_types(Task::drum);
  REQUIRE(drum.size() == 6);
  for (TypeId t : drum) {
    CHECK(r.is_source(t));
    CHECK(r.spec(t).inlets.empty());
    CHECK(r.spec(t).outlets.size() == 1);
    CHECK(r.spec(t).params.empty());
  }
  CHECK(parse_task("drum") == Task::drum);
  CHECK_FALSE(parse_task("guitar"));
}

TEST_CASE("descriptor invariants") {
  for (const auto& s : Registry::instance().specs()) {
    for (const auto& d : s.params) {
      INFO(s.name << "." << d.name);
      CHECK(d.phys_min < d.phys_max);
      CHECK(d.default_value >= d.phys_min);
      CHECK(d.default_value <= d.phys_max);
      if (d.scale == Scale::log) CHECK(d.phys_min > 0.0);
    }
  }
}

TEST_CASE("edge-type vocabulary covers kind-compatible pairs once") {
  const auto& r = Registry::instance();
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : r.edge_types()) {
    CHECK(seen.insert({e.outlet, e.inlet}).second);
    CHECK(r.edge_type_index(e.outlet, e.inlet).has_value());
  }
  CHECK(r.edge_type_index("out", "in").has_value());
  CHECK(r.edge_type_index("lfo", "mod").has_value());
  CHECK_FALSE(r.edge_type_index("out", "mod"));
  CHECK_FALSE(r.edge_type_index("lfo", "in"));
}

TEST_CASE("map_param endpoints and midpoints") {
  const auto& freq = spec_of(id_of(Proc::lowpass)).params[0];
  CHECK(dsp::map_param(freq, 0.0) == Approx(20.0));
  CHECK(dsp::map_param(freq, 1.0) == Approx(20000.0));
  CHECK(dsp::map_param(freq, 0.5) == Approx(std::sqrt(20.0 * 20000.0)).epsilon(1e-12));
  CHECK(dsp::map_param(freq, 0.5) == Approx(632.4555).epsilon(1e-6));
  const auto& pan = spec_of(id_of(Proc::panning)).params[0];
  CHECK(dsp::map_param(pan, 0.5) == Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(dsp::map_param(freq, 1.5), Error);
  CHECK_THROWS_AS(dsp::map_param(freq, -0.1), Error);
}

TEST_CASE("unmap inverts map within 1e-9 for every descriptor") {
  Rng rng(11);
  for (const auto& s : Registry::instance().specs()) {
    for (const auto& d : s.params) {
      for (int i = 0; i < 100; ++i) {
        const double v = rng.uniform();
        const double phys = dsp::map_param(d, v);
        CHECK(dsp::unmap_param(d, phys) == Approx(v).epsilon(1e-9).margin(1e-12));
        CHECK(dsp::map_param(d, dsp::unmap_param(d, phys)) == Approx(phys).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("per-type delay sub-ranges") {
  auto range = [](Proc p) {
    const auto& d = spec_of(id_of(p)).params[0];
    return std::pair{d.phys_min, d.phys_max};
  };
  CHECK(range(Proc::flanger) == std::pair{1.0, 5.0});
  CHECK(range(Proc::chorus) == std::pair{5.0, 30.0});
  CHECK(range(Proc::vibrato) == std::pair{2.0, 10.0});
  CHECK(range(Proc::mono_delay) == std::pair{50.0, 1000.0});
}

TEST_CASE("type classes") {
  CHECK(is_lti_filter_type(id_of(Proc::bell)));
  CHECK(is_lti_filter_type(id_of(Proc::highpass4)));
  CHECK_FALSE(is_lti_filter_type(id_of(Proc::phaser)));
  CHECK_FALSE(is_lti_filter_type(id_of(Proc::crossover)));
  CHECK_FALSE(is_lti_filter_type(id_of(Proc::mono_reverb)));
  CHECK(is_low_order_linear_filter(id_of(Proc::crossover)));
  CHECK(is_low_order_linear_filter(id_of(Proc::phaser)));
  CHECK_FALSE(is_low_order_linear_filter(id_of(Proc::chorus)));
  CHECK(is_dynamics_type(id_of(Proc::noisegate)));
  CHECK_FALSE(is_dynamics_type(id_of(Proc::distortion)));
}

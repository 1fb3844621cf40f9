#include "graphfx/registry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graphfx/errors.hpp"

namespace graphfx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

InletSpec audio_in(std::string name, bool optional = false) {
  return {std::move(name), PortKind::audio, optional};
}
InletSpec control_in(std::string name, bool optional) {
  return {std::move(name), PortKind::control, optional};
}
OutletSpec audio_out(std::string name) { return {std::move(name), PortKind::audio}; }

ParamDescriptor lin(std::string name, double lo, double hi, double def) {
  return {std::move(name), lo, hi, Scale::linear, def};
}
ParamDescriptor logp(std::string name, double lo, double hi, double def) {
  return {std::move(name), lo, hi, Scale::log, def};
}

ParamDescriptor filter_frequency() { return logp("frequency", 20.0, 20000.0, 1000.0); }
ParamDescriptor filter_q() { return logp("q", 0.3, 10.0, 0.7071); }
ParamDescriptor feedback() { return lin("feedback", 0.0, 0.9, 0.3); }
ParamDescriptor mix_param() { return lin("mix", 0.0, 1.0, 0.5); }

std::vector<ParamDescriptor> dynamics_params() {
  return {lin("threshold", -60.0, 0.0, -20.0), logp("ratio", 1.0, 20.0, 4.0),
          logp("attack", 0.1, 100.0, 5.0), logp("release", 10.0, 1000.0, 100.0),
          lin("knee", 0.0, 12.0, 6.0)};
}

}  // namespace

double ParamDescriptor::to_physical(double v) const {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error("normalized value for '" + name + "' out of [0,1]");
  }
  if (scale == Scale::linear) return phys_min + v * (phys_max - phys_min);
  const double lo = std::log(phys_min);
  const double hi = std::log(phys_max);
  return std::exp(lo + v * (hi - lo));
}

double ParamDescriptor::to_normalized(double physical) const {
  const double p = std::clamp(physical, phys_min, phys_max);
  if (scale == Scale::linear) return (p - phys_min) / (phys_max - phys_min);
  const double lo = std::log(phys_min);
  const double hi = std::log(phys_max);
  return std::clamp((std::log(p) - lo) / (hi - lo), 0.0, 1.0);
}

std::optional<int> ProcessorSpec::inlet_index(std::string_view n) const {
  for (std::size_t i = 0; i < inlets.size(); ++i)
    if (inlets[i].name == n) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> ProcessorSpec::outlet_index(std::string_view n) const {
  for (std::size_t i = 0; i < outlets.size(); ++i)
    if (outlets[i].name == n) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> ProcessorSpec::param_index(std::string_view n) const {
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i].name == n) return static_cast<int>(i);
  return std::nullopt;
}

Registry::Registry() {
  auto add = [this](Proc p, std::string name, Family family,
                    std::vector<InletSpec> inlets, std::vector<OutletSpec> outlets,
                    std::vector<ParamDescriptor> params) {
    specs_.push_back({id_of(p), std::move(name), family, std::move(inlets),
                      std::move(outlets), std::move(params)});
  };

  const std::pair<Proc, const char*> sources[] = {
      {Proc::in, "in"},   {Proc::kick, "kick"}, {Proc::snare, "snare"},
      {Proc::hat, "hat"}, {Proc::tom, "tom"},   {Proc::ride, "ride"},
      {Proc::crash, "crash"}};
  for (const auto& [p, name] : sources) {
    add(p, name, Family::source, {}, {audio_out("out")}, {});
  }

  const std::pair<Proc, const char*> pass_filters[] = {
      {Proc::lowpass, "lowpass"},     {Proc::bandpass, "bandpass"},
      {Proc::highpass, "highpass"},   {Proc::bandreject, "bandreject"},
      {Proc::lowpass4, "lowpass4"},   {Proc::bandpass4, "bandpass4"},
      {Proc::highpass4, "highpass4"}};
  for (const auto& [p, name] : pass_filters) {
    add(p, name, Family::low_order_filter,
        {audio_in("in"), control_in("frequency", true)}, {audio_out("out")},
        {filter_frequency(), filter_q()});
  }

  const std::pair<Proc, const char*> eq_filters[] = {
      {Proc::lowshelf, "lowshelf"}, {Proc::highshelf, "highshelf"}, {Proc::bell, "bell"}};
  for (const auto& [p, name] : eq_filters) {
    add(p, name, Family::low_order_filter,
        {audio_in("in"), control_in("frequency", true), control_in("gain", true)},
        {audio_out("out")},
        {filter_frequency(), filter_q(), lin("gain", -24.0, 24.0, 0.0)});
  }

  add(Proc::crossover, "crossover", Family::low_order_filter,
      {audio_in("in"), control_in("frequency", true)},
      {audio_out("low"), audio_out("high")}, {filter_frequency()});
  add(Proc::phaser, "phaser", Family::low_order_filter,
      {audio_in("in"), control_in("mod", false)}, {audio_out("out")},
      {filter_frequency(), feedback(), mix_param()});

  add(Proc::chorus, "chorus", Family::high_order_filter,
      {audio_in("in"), control_in("mod", false)}, {audio_out("out")},
      {logp("delay", 5.0, 30.0, 15.0), feedback(), mix_param()});
  add(Proc::flanger, "flanger", Family::high_order_filter,
      {audio_in("in"), control_in("mod", false)}, {audio_out("out")},
      {logp("delay", 1.0, 5.0, 2.5), feedback(), mix_param()});
  add(Proc::vibrato, "vibrato", Family::high_order_filter,
      {audio_in("in"), control_in("mod", false)}, {audio_out("out")},
      {logp("delay", 2.0, 10.0, 5.0), feedback(), mix_param()});

  for (auto [p, name] : {std::pair{Proc::mono_delay, "mono_delay"},
                         std::pair{Proc::pingpong_delay, "pingpong_delay"}}) {
    add(p, name, Family::high_order_filter, {audio_in("in")}, {audio_out("out")},
        {logp("delay", 50.0, 1000.0, 250.0), feedback(), mix_param(),
         filter_frequency(), filter_q(), lin("stereo_offset", 0.0, 1.0, 0.5)});
  }
  for (auto [p, name] : {std::pair{Proc::mono_reverb, "mono_reverb"},
                         std::pair{Proc::stereo_reverb, "stereo_reverb"}}) {
    add(p, name, Family::high_order_filter, {audio_in("in")}, {audio_out("out")},
        {lin("size", 0.0, 1.0, 0.5), lin("damping", 0.0, 1.0, 0.5),
         lin("width", 0.0, 1.0, 0.5), mix_param()});
  }

  add(Proc::distortion, "distortion", Family::nonlinear, {audio_in("in")},
      {audio_out("out")},
      {lin("gain", 0.0, 36.0, 12.0), lin("hardness", 0.0, 1.0, 0.5),
       lin("asymmetry", -1.0, 1.0, 0.0)});
  add(Proc::bitcrush, "bitcrush", Family::nonlinear, {audio_in("in")},
      {audio_out("out")}, {lin("bit", 2.0, 16.0, 8.0)});
  for (auto [p, name] : {std::pair{Proc::compressor, "compressor"},
                         std::pair{Proc::noisegate, "noisegate"},
                         std::pair{Proc::expander, "expander"}}) {
    add(p, name, Family::nonlinear, {audio_in("in"), audio_in("sidechain", true)},
        {audio_out("out")}, dynamics_params());
  }
  add(Proc::pitchshift, "pitchshift", Family::nonlinear, {audio_in("in")},
      {audio_out("out")}, {lin("semitone", -12.0, 12.0, 0.0)});

  add(Proc::mix, "mix", Family::utility, {audio_in("in")}, {audio_out("out")}, {});
  add(Proc::panning, "panning", Family::utility,
      {audio_in("in"), control_in("pan", true)}, {audio_out("out")},
      {lin("pan", -1.0, 1.0, 0.0)});
  add(Proc::imager, "imager", Family::utility, {audio_in("in")}, {audio_out("out")},
      {lin("width", 0.0, 1.0, 0.5)});
  add(Proc::ms_split, "ms_split", Family::utility, {audio_in("in")},
      {audio_out("mid"), audio_out("side")}, {});
  add(Proc::ms_merge, "ms_merge", Family::utility,
      {audio_in("mid"), audio_in("side")}, {audio_out("out")}, {});

  for (auto [p, name] : {std::pair{Proc::lfo, "lfo"},
                         std::pair{Proc::stereo_lfo, "stereo_lfo"}}) {
    add(p, name, Family::control, {}, {{"lfo", PortKind::control}},
        {logp("frequency", 0.05, 10.0, 1.0), lin("phase", 0.0, kTwoPi, 0.0),
         lin("stereo_offset", 0.0, kTwoPi, kTwoPi / 4.0)});
  }
  add(Proc::envelope_follower, "envelope_follower", Family::control,
      {audio_in("in")}, {{"env", PortKind::control}},
      {logp("attack", 0.1, 100.0, 5.0), logp("release", 10.0, 1000.0, 100.0),
       lin("gain", 0.0, 24.0, 6.0)});

  add(Proc::out, "out", Family::sink, {audio_in("in")}, {}, {});

  // Vocabulary of edge types in first-appearance order of names.
  std::vector<OutletSpec> outlet_names;
  std::vector<InletSpec> inlet_names;
  for (const auto& s : specs_) {
    for (const auto& o : s.outlets) {
      if (std::none_of(outlet_names.begin(), outlet_names.end(),
                       [&](const OutletSpec& x) { return x.name == o.name; }))
        outlet_names.push_back(o);
    }
    for (const auto& i : s.inlets) {
      if (std::none_of(inlet_names.begin(), inlet_names.end(),
                       [&](const InletSpec& x) { return x.name == i.name; }))
        inlet_names.push_back(i);
    }
  }
  for (const auto& o : outlet_names)
    for (const auto& i : inlet_names)
      if (o.kind == i.kind) edge_types_.push_back({o.name, i.name});

  singing_sources_ = {id_of(Proc::in)};
  for (Proc p : {Proc::kick, Proc::snare, Proc::hat, Proc::tom, Proc::ride, Proc::crash})
    drum_sources_.push_back(id_of(p));
}

const Registry& Registry::instance() {
  static const Registry registry;
  return registry;
}

const ProcessorSpec& Registry::spec(TypeId t) const {
  if (t < 0 || t >= static_cast<TypeId>(specs_.size())) {
    throw Error("unknown type_id " + std::to_string(t));
  }
  return specs_[static_cast<std::size_t>(t)];
}

std::optional<TypeId> Registry::find(std::string_view name) const {
  for (const auto& s : specs_)
    if (s.name == name) return s.type_id;
  return std::nullopt;
}

std::optional<int> Registry::edge_type_index(std::string_view outlet,
                                             std::string_view inlet) const {
  for (std::size_t i = 0; i < edge_types_.size(); ++i)
    if (edge_types_[i].outlet == outlet && edge_types_[i].inlet == inlet)
      return static_cast<int>(i);
  return std::nullopt;
}

std::span<const TypeId> Registry::source_types(Task task) const {
  return task == Task::singing ? std::span<const TypeId>(singing_sources_)
                               : std::span<const TypeId>(drum_sources_);
}

bool Registry::is_source(TypeId t) const {
  return t >= id_of(Proc::in) && t <= id_of(Proc::crash);
}

const ProcessorSpec& spec_of(TypeId t) { return Registry::instance().spec(t); }

std::string_view task_name(Task t) { return t == Task::singing ? "singing" : "drum"; }

std::optional<Task> parse_task(std::string_view s) {
  if (s == "singing") return Task::singing;
  if (s == "drum") return Task::drum;
  return std::nullopt;
}

bool is_lti_filter_type(TypeId t) {
  return t >= id_of(Proc::lowpass) && t <= id_of(Proc::bell);
}

bool is_low_order_linear_filter(TypeId t) {
  return t >= id_of(Proc::lowpass) && t <= id_of(Proc::phaser);
}

bool is_dynamics_type(TypeId t) {
  return t == id_of(Proc::compressor) || t == id_of(Proc::noisegate) ||
         t == id_of(Proc::expander);
}

}  // namespace graphfx

#include "accentnet/models.hpp"

#include <cstdio>
#include <sstream>

#include "accentnet/error.hpp"

namespace accentnet::models {

namespace {

int conv_out(int in, int kernel, int stride, int pad) {
  const int span = in + 2 * pad - kernel;
  check_internal(span >= 0, "shape propagation: kernel larger than padded input");
  return span / stride + 1;  // floor
}

std::size_t conv_params(int in_ch, int out_ch, int kernel, int groups, bool bias) {
  return static_cast<std::size_t>(out_ch) * (in_ch / groups) * kernel * kernel +
         (bias ? static_cast<std::size_t>(out_ch) : 0);
}

std::size_t bn_params(int ch) { return 2 * static_cast<std::size_t>(ch); }

std::size_t linear_params(int in, int out) {
  return static_cast<std::size_t>(in) * out + out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const auto& f : split_on(s, ',')) out.push_back(std::stoi(f));
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::vector<ShapeCheckpoint> propagate_shapes(const ArchSchedule& s) {
  check_internal(!s.stages.empty(), "schedule has no stages");
  check_internal(!s.heads.empty(), "schedule has no heads");
  std::vector<ShapeCheckpoint> out;
  int h = conv_out(s.input_height, 7, 2, 3);
  int w = conv_out(s.input_width, 7, 2, 3);
  out.push_back({"stem conv", s.stem_channels, h, w, false});
  if (s.stem_pool) {
    h = conv_out(h, 3, 2, 1);
    w = conv_out(w, 3, 2, 1);
  }
  int ch = s.stem_channels;
  std::size_t t = 0;
  for (std::size_t b = 0; b < s.stages.size(); ++b) {
    const auto& stage = s.stages[b];
    ch += stage.block.layers * stage.block.growth;
    out.push_back({"block " + std::to_string(b + 1), ch, h, w, true});
    if (stage.transition_out > 0) {
      ++t;
      ch = stage.transition_out;
      h = conv_out(h, 2, 2, 0);
      w = conv_out(w, 2, 2, 0);
      out.push_back({"transition " + std::to_string(t), ch, h, w, true});
    }
  }
  out.push_back({"global pool", ch, 1, 1, false});
  return out;
}

void validate_schedule(const ArchSchedule& s) {
  if (s.in_channels < 1 || s.stem_channels < 1 || s.input_height < 1 || s.input_width < 1)
    data_error("schedule '" + s.id + "': non-positive dimensions");
  for (std::size_t b = 0; b < s.stages.size(); ++b) {
    const auto& block = s.stages[b].block;
    const std::string where = "schedule '" + s.id + "' block " + std::to_string(b + 1);
    if (block.layers < 1 || block.growth < 1) data_error(where + ": bad layers/growth");
    if (block.variant == nn::DenseVariant::psa) {
      const int width = block.bottleneck_width();
      if (width % s.spc.s != 0)
        data_error(where + ": bottleneck " + std::to_string(width) +
                   " not divisible by SPC split count " + std::to_string(s.spc.s));
      const int per_split = width / s.spc.s;
      for (int g : s.spc.group_sizes)
        if (per_split % g != 0)
          data_error(where + ": SPC split width " + std::to_string(per_split) +
                     " not divisible by conv group size " + std::to_string(g));
      if (per_split % s.se_reduction != 0)
        data_error(where + ": SPC split width " + std::to_string(per_split) +
                   " not divisible by SE reduction " + std::to_string(s.se_reduction));
    }
  }

  const auto checkpoints = propagate_shapes(s);
  if (!s.expected_sizes.empty()) {
    if (s.expected_sizes.size() != checkpoints.size())
      data_error("schedule '" + s.id + "': expected_sizes lists " +
                 std::to_string(s.expected_sizes.size()) + " checkpoints, propagation yields " +
                 std::to_string(checkpoints.size()));
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      const auto& cp = checkpoints[i];
      const auto& [eh, ew] = s.expected_sizes[i];
      if (cp.h != eh || cp.w != ew)
        data_error("schedule '" + s.id + "' at " + cp.stage + ": computed size " +
                   std::to_string(cp.h) + "x" + std::to_string(cp.w) + ", expected " +
                   std::to_string(eh) + "x" + std::to_string(ew));
    }
  }
  if (!s.expected_channels.empty()) {
    std::vector<const ShapeCheckpoint*> pinned;
    for (const auto& cp : checkpoints)
      if (cp.counts_channels) pinned.push_back(&cp);
    if (s.expected_channels.size() != pinned.size())
      data_error("schedule '" + s.id + "': expected_channels lists " +
                 std::to_string(s.expected_channels.size()) + " checkpoints, propagation yields " +
                 std::to_string(pinned.size()));
    for (std::size_t i = 0; i < pinned.size(); ++i) {
      if (pinned[i]->channels != s.expected_channels[i])
        data_error("schedule '" + s.id + "' at " + pinned[i]->stage + ": computed " +
                   std::to_string(pinned[i]->channels) + " channels, expected " +
                   std::to_string(s.expected_channels[i]));
    }
  }
}

std::size_t count_parameters(const ArchSchedule& s) {
  std::size_t total = conv_params(s.in_channels, s.stem_channels, 7, 1, false) +
                      bn_params(s.stem_channels);
  int ch = s.stem_channels;
  for (const auto& stage : s.stages) {
    const auto& block = stage.block;
    const int b = block.bottleneck_width();
    for (int i = 0; i < block.layers; ++i) {
      const int cin = ch + i * block.growth;
      total += bn_params(cin) + conv_params(cin, b, 1, 1, false) + bn_params(b);
      if (block.variant == nn::DenseVariant::plain3x3) {
        total += conv_params(b, block.growth, 3, 1, false);
      } else {
        const int per_split = b / s.spc.s;
        for (int k = 0; k < s.spc.s; ++k)
          total += conv_params(per_split, per_split, s.spc.kernel_sizes[k],
                               s.spc.group_sizes[k], false);
        total += linear_params(per_split, per_split / s.se_reduction) +
                 linear_params(per_split / s.se_reduction, per_split);
        total += conv_params(b, block.growth, 1, 1, false);
      }
    }
    ch += block.layers * block.growth;
    if (stage.transition_out > 0) {
      total += bn_params(ch) + conv_params(ch, stage.transition_out, 1, 1, false);
      ch = stage.transition_out;
    }
  }
  total += bn_params(ch);
  for (int classes : s.heads) total += linear_params(ch, classes);
  return total;
}

namespace {

ArchSchedule densenet121_base() {
  ArchSchedule s;
  s.id = "densenet121";
  s.stem_channels = 64;
  s.heads = {6};
  const int repeats[4] = {6, 12, 24, 16};
  int ch = 64;
  for (int i = 0; i < 4; ++i) {
    StageSpec stage;
    stage.block = {repeats[i], 32, 0, nn::DenseVariant::plain3x3};
    ch += repeats[i] * 32;
    if (i < 3) {
      stage.transition_out = ch / 2;  // compression 1/2
      ch /= 2;
    }
    s.stages.push_back(stage);
  }
  s.expected_channels = {256, 128, 512, 256, 1024, 512, 1024};
  s.expected_sizes = {{32, 256}, {16, 128}, {8, 64}, {8, 64}, {4, 32},
                      {4, 32},   {2, 16},   {2, 16}, {1, 1}};
  return s;
}

ArchSchedule mpsa_schedule() {
  ArchSchedule s;
  s.id = "mpsa";
  s.stem_channels = 64;
  s.heads = {6, 2, 5};
  // Bottleneck width 256 throughout, as printed in the structure table; block
  // 4's growth-24 delta makes the 4*growth default (96) incompatible with the
  // SPC group sizes, so the literal 256 wins there too.
  s.stages = {
      {{6, 64, 256, nn::DenseVariant::psa}, 208},
      {{12, 64, 256, nn::DenseVariant::psa}, 488},
      {{24, 64, 256, nn::DenseVariant::psa}, 1012},
      {{16, 24, 256, nn::DenseVariant::psa}, 0},
  };
  s.expected_channels = {448, 208, 976, 488, 2024, 1012, 1396};
  s.expected_sizes = {{32, 256}, {16, 128}, {8, 64}, {8, 64}, {4, 32},
                      {4, 32},   {2, 16},   {2, 16}, {1, 1}};
  return s;
}

ArchSchedule mpsa_tiny_schedule() {
  ArchSchedule s;
  s.id = "mpsa_tiny";
  s.input_width = 64;
  s.stem_channels = 16;
  s.heads = {6, 2, 5};
  s.spc.s = 2;
  s.spc.kernel_sizes = {3, 5};
  s.spc.group_sizes = {1, 2};
  s.se_reduction = 4;
  s.stages = {
      {{2, 8, 32, nn::DenseVariant::psa}, 16},
      {{2, 8, 32, nn::DenseVariant::psa}, 0},
  };
  s.expected_channels = {32, 16, 32};
  s.expected_sizes = {{32, 32}, {16, 16}, {8, 8}, {8, 8}, {1, 1}};
  return s;
}

}  // namespace

std::vector<std::string> known_model_ids() {
  return {"densenet121", "multi", "psa", "mpsa", "mpsa_tiny"};
}

ArchSchedule schedule_for(const std::string& id) {
  if (id == "densenet121") return densenet121_base();
  if (id == "multi") {
    ArchSchedule s = densenet121_base();
    s.id = "multi";
    s.heads = {6, 2, 5};
    return s;
  }
  if (id == "psa") {
    ArchSchedule s = densenet121_base();
    s.id = "psa";
    for (auto& stage : s.stages) stage.block.variant = nn::DenseVariant::psa;
    return s;
  }
  if (id == "mpsa") return mpsa_schedule();
  if (id == "mpsa_tiny") return mpsa_tiny_schedule();
  std::string ids;
  for (const auto& known : known_model_ids()) ids += (ids.empty() ? "" : ", ") + known;
  usage_error("unknown model id '" + id + "' (valid: " + ids + ")");
}

ArchSchedule schedule_for(const std::string& id, const std::vector<int>& heads_override) {
  ArchSchedule s = schedule_for(id);
  if (!heads_override.empty()) s.heads = heads_override;
  return s;
}

std::vector<std::string> task_names(const ArchSchedule& s) {
  if (s.heads.size() == 1) return {"accent"};
  if (s.heads.size() == 3) return {"accent", "gender", "age"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < s.heads.size(); ++i) names.push_back("task" + std::to_string(i));
  return names;
}

std::string report_architecture(const ArchSchedule& s) {
  std::ostringstream out;
  const auto checkpoints = propagate_shapes(s);
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s  %-52s  %s\n", "Layers", s.id.c_str(), "Output Size");
  out << line;
  std::size_t cp = 0;
  std::snprintf(line, sizeof(line), "%-16s  %-52s  %dx%d\n", "Convolution",
                ("7 x 7, stride 2, " + std::to_string(s.stem_channels) + " channels").c_str(),
                checkpoints[cp].h, checkpoints[cp].w);
  out << line;
  ++cp;
  std::size_t t = 0;
  for (std::size_t b = 0; b < s.stages.size(); ++b) {
    const auto& block = s.stages[b].block;
    const std::string inner =
        "1 x 1 conv " + std::to_string(block.bottleneck_width()) +
        (block.variant == nn::DenseVariant::psa ? "; PSAModule" : "; 3 x 3 conv");
    std::snprintf(line, sizeof(line), "%-16s  %-52s  %dx%d\n",
                  ("Block " + std::to_string(b + 1)).c_str(),
                  ("[" + inner + "] x " + std::to_string(block.layers) + ", " +
                   std::to_string(checkpoints[cp].channels) + " channels")
                      .c_str(),
                  checkpoints[cp].h, checkpoints[cp].w);
    out << line;
    ++cp;
    if (s.stages[b].transition_out > 0) {
      ++t;
      std::snprintf(line, sizeof(line), "%-16s  %-52s  %dx%d\n",
                    ("Transition " + std::to_string(t)).c_str(),
                    ("[1 x 1 conv; AvgPool(2)], " + std::to_string(checkpoints[cp].channels) +
                     " channels")
                        .c_str(),
                    checkpoints[cp].h, checkpoints[cp].w);
      out << line;
      ++cp;
    }
  }
  std::snprintf(line, sizeof(line), "%-16s  %-52s  %dx%d\n", "Classification", "GlobalAvgPool",
                checkpoints[cp].h, checkpoints[cp].w);
  out << line;
  std::string heads;
  for (std::size_t i = 0; i < s.heads.size(); ++i)
    heads += (i ? "/" : "") + std::to_string(s.heads[i]) + "d";
  std::snprintf(line, sizeof(line), "%-16s  %-52s\n", "", (heads + " fc, Softmax").c_str());
  out << line;
  out << "Total parameters: " << count_parameters(s) << "\n";
  return out.str();
}

std::string ArchSchedule::to_string() const {
  std::ostringstream out;
  out << "id=" << id << ";in=" << in_channels << ";h=" << input_height << ";w=" << input_width
      << ";stem=" << stem_channels << ";pool=" << (stem_pool ? 1 : 0) << ";se_r=" << se_reduction
      << ";spc_s=" << spc.s << ";spc_k=" << join_ints(spc.kernel_sizes)
      << ";spc_g=" << join_ints(spc.group_sizes) << ";heads=" << join_ints(heads) << ";stages=";
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i) out << "|";
    const auto& st = stages[i];
    out << st.block.layers << ":" << st.block.growth << ":" << st.block.bottleneck << ":"
        << (st.block.variant == nn::DenseVariant::psa ? "psa" : "plain") << ":"
        << st.transition_out;
  }
  out << ";ec=" << join_ints(expected_channels) << ";es=";
  for (std::size_t i = 0; i < expected_sizes.size(); ++i) {
    if (i) out << ",";
    out << expected_sizes[i].first << "x" << expected_sizes[i].second;
  }
  return out.str();
}

ArchSchedule ArchSchedule::from_string(const std::string& text) {
  ArchSchedule s;
  s.expected_channels.clear();
  s.expected_sizes.clear();
  for (const auto& field : split_on(text, ';')) {
    const std::size_t eq = field.find('=');
    if (eq == std::string::npos) data_error("schedule string: field without '=': " + field);
    const std::string key = field.substr(0, eq);
    const std::string val = field.substr(eq + 1);
    try {
      if (key == "id") s.id = val;
      else if (key == "in") s.in_channels = std::stoi(val);
      else if (key == "h") s.input_height = std::stoi(val);
      else if (key == "w") s.input_width = std::stoi(val);
      else if (key == "stem") s.stem_channels = std::stoi(val);
      else if (key == "pool") s.stem_pool = std::stoi(val) != 0;
      else if (key == "se_r") s.se_reduction = std::stoi(val);
      else if (key == "spc_s") s.spc.s = std::stoi(val);
      else if (key == "spc_k") s.spc.kernel_sizes = parse_int_list(val);
      else if (key == "spc_g") s.spc.group_sizes = parse_int_list(val);
      else if (key == "heads") s.heads = parse_int_list(val);
      else if (key == "ec") s.expected_channels = parse_int_list(val);
      else if (key == "es") {
        if (!val.empty()) {
          for (const auto& pair : split_on(val, ',')) {
            const auto hw = split_on(pair, 'x');
            if (hw.size() != 2) data_error("schedule string: bad size '" + pair + "'");
            s.expected_sizes.emplace_back(std::stoi(hw[0]), std::stoi(hw[1]));
          }
        }
      } else if (key == "stages") {
        s.stages.clear();
        for (const auto& st : split_on(val, '|')) {
          const auto f = split_on(st, ':');
          if (f.size() != 5) data_error("schedule string: bad stage '" + st + "'");
          StageSpec stage;
          stage.block.layers = std::stoi(f[0]);
          stage.block.growth = std::stoi(f[1]);
          stage.block.bottleneck = std::stoi(f[2]);
          stage.block.variant = f[3] == "psa" ? nn::DenseVariant::psa : nn::DenseVariant::plain3x3;
          stage.transition_out = std::stoi(f[4]);
          s.stages.push_back(stage);
        }
      } else {
        data_error("schedule string: unknown field '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      data_error("schedule string: cannot parse value in field '" + field + "'");
    } catch (const std::out_of_range&) {
      data_error("schedule string: value out of range in field '" + field + "'");
    }
  }
  return s;
}

}  // namespace accentnet::models

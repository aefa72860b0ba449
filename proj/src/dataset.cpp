#include "accentnet/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <limits>

#include "accentnet/error.hpp"
#include "accentnet/io_util.hpp"
#include "accentnet/rng.hpp"

namespace accentnet::dataset {

const char* const kAccentNames[kNumAccents] = {"Scottish", "British",  "German",
                                               "American", "India",    "Mandarin"};
const char* const kAgeGroupNames[kNumAgeGroups] = {"below-20", "20-29", "30-39", "40-49",
                                                   "50-and-above"};
const char* const kGenderNames[kNumGenders] = {"male", "female"};

namespace {

constexpr double kPcm16Scale = 32768.0;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
  bool seen = false;
};

}  // namespace

AudioClip decode_wav(const std::string& bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  if (r.raw(4, "RIFF tag") != "RIFF") data_error(source + ": not a RIFF file");
  r.u32("RIFF size");
  if (r.raw(4, "WAVE tag") != "WAVE") data_error(source + ": RIFF form is not WAVE");

  FmtChunk fmt;
  std::string data;
  bool have_data = false;
  while (r.remaining() >= 8) {
    const std::string id = r.raw(4, "chunk id");
    const std::uint32_t size = r.u32("chunk size");
    if (id == "fmt ") {
      if (size < 16) data_error(source + ": fmt chunk too small (" + std::to_string(size) + ")");
      fmt.format = r.u16("audio format");
      fmt.channels = r.u16("channel count");
      fmt.sample_rate = r.u32("sample rate");
      r.u32("byte rate");
      r.u16("block align");
      fmt.bits = r.u16("bits per sample");
      if (size > 16) r.skip(size - 16, "fmt extension");
      fmt.seen = true;
    } else if (id == "data") {
      data = r.raw(size, "sample data");
      have_data = true;
    } else {
      r.skip(size, "chunk '" + id + "'");
    }
    if (size % 2 == 1 && r.remaining() > 0) r.skip(1, "chunk padding");
  }

  if (!fmt.seen) data_error(source + ": missing fmt chunk");
  if (!have_data) data_error(source + ": missing data chunk");
  if (fmt.format != 1 && fmt.format != 3)
    data_error(source + ": unsupported audio format tag " + std::to_string(fmt.format) +
               " (need PCM=1 or IEEE-float=3)");
  if (fmt.channels != 1 && fmt.channels != 2)
    data_error(source + ": unsupported channel count " + std::to_string(fmt.channels));
  if (fmt.format == 1 && fmt.bits != 16)
    data_error(source + ": unsupported PCM bit depth " + std::to_string(fmt.bits) +
               " (need 16)");
  if (fmt.format == 3 && fmt.bits != 32)
    data_error(source + ": unsupported float bit depth " + std::to_string(fmt.bits) +
               " (need 32)");

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t n_frames = data.size() / frame_bytes;

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.samples.assign(fmt.channels, std::vector<float>(n_frames));
  const auto* raw = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t i = 0; i < n_frames; ++i) {
    for (std::uint16_t ch = 0; ch < fmt.channels; ++ch) {
      const std::size_t off = i * frame_bytes + ch * bytes_per_sample;
      if (fmt.format == 1) {
        const std::int16_t v = static_cast<std::int16_t>(raw[off] | (raw[off + 1] << 8));
        clip.samples[ch][i] = static_cast<float>(v / kPcm16Scale);
      } else {
        std::uint32_t u = 0;
        for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(raw[off + b]) << (8 * b);
        float f;
        static_assert(sizeof(f) == 4);
        std::memcpy(&f, &u, 4);
        clip.samples[ch][i] = f;
      }
    }
  }
  for (const auto& ch : clip.samples)
    for (float v : ch)
      if (!std::isfinite(v)) data_error(source + ": non-finite sample value");
  return clip;
}

AudioClip load_wav(const std::string& path) { return decode_wav(io::read_file(path), path); }

std::string encode_wav_pcm16(const AudioClip& clip) {
  check_internal(clip.channels() >= 1, "encode_wav_pcm16: no channels");
  const std::uint16_t channels = static_cast<std::uint16_t>(clip.channels());
  const std::uint32_t n = static_cast<std::uint32_t>(clip.length());
  const std::uint32_t data_bytes = n * channels * 2;

  std::string out;
  out.reserve(44 + data_bytes);
  out.append("RIFF", 4);
  io::put_u32(out, 36 + data_bytes);
  out.append("WAVE", 4);
  out.append("fmt ", 4);
  io::put_u32(out, 16);
  io::put_u16(out, 1);  // PCM
  io::put_u16(out, channels);
  io::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  io::put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * channels * 2);
  io::put_u16(out, channels * 2);
  io::put_u16(out, 16);
  out.append("data", 4);
  io::put_u32(out, data_bytes);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint16_t ch = 0; ch < channels; ++ch) {
      double v = std::clamp(static_cast<double>(clip.samples[ch][i]), -1.0, 1.0) * kPcm16Scale;
      const long q = std::lround(v);
      io::put_u16(out, static_cast<std::uint16_t>(
                           static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
    }
  }
  return out;
}

void write_wav_pcm16(const AudioClip& clip, const std::string& path) {
  io::write_file_atomic(path, encode_wav_pcm16(clip));
}

namespace {

std::vector<float> resample_linear(const std::vector<float>& in, int in_sr, int out_sr) {
  if (in_sr == out_sr) return in;
  const double ratio = static_cast<double>(in_sr) / out_sr;
  const std::size_t out_len =
      static_cast<std::size_t>(std::ceil(static_cast<double>(in.size()) * out_sr / in_sr));
  std::vector<float> out(out_len);
  const std::size_t last = in.size() - 1;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = i * ratio;
    std::size_t i0 = static_cast<std::size_t>(pos);
    if (i0 > last) i0 = last;
    const std::size_t i1 = std::min(i0 + 1, last);
    const double frac = pos - static_cast<double>(i0);
    out[i] = static_cast<float>(in[i0] + frac * (in[i1] - in[i0]));
  }
  return out;
}

}  // namespace

AudioClip standardize(const AudioClip& clip, int target_sr, double duration_s) {
  if (clip.length() == 0) data_error("standardize: empty clip");
  check_internal(clip.sample_rate > 0, "standardize: clip has no sample rate");
  check_internal(target_sr > 0 && duration_s > 0, "standardize: bad target rate/duration");

  AudioClip out;
  out.sample_rate = target_sr;
  for (const auto& ch : clip.samples)
    out.samples.push_back(resample_linear(ch, clip.sample_rate, target_sr));
  if (out.channels() == 1) out.samples.push_back(out.samples[0]);
  if (out.channels() != 2)
    data_error("standardize: expected 1 or 2 input channels, got " +
               std::to_string(clip.channels()));

  const std::size_t target_len =
      static_cast<std::size_t>(std::llround(duration_s * target_sr));
  for (auto& ch : out.samples) ch.resize(target_len, 0.0f);  // trim or pad the tail
  return out;
}

double gaussian_sample(std::mt19937_64& generator) { return rng::gaussian(generator); }

AudioClip add_gaussian_noise(const AudioClip& clip, double sigma_lsb, std::uint64_t seed) {
  if (sigma_lsb < 0.0) data_error("add_gaussian_noise: negative sigma");
  AudioClip out = clip;
  if (sigma_lsb == 0.0) return out;
  const double sigma = sigma_lsb / kPcm16Scale;
  std::mt19937_64 rng(seed);
  for (auto& ch : out.samples)
    for (auto& v : ch) {
      const double noisy = static_cast<double>(v) + sigma * gaussian_sample(rng);
      v = static_cast<float>(std::clamp(noisy, -1.0, 1.0));
    }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

int parse_label(const std::string& field, const char* name, int max_exclusive, std::size_t row) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(field, &pos);
  } catch (const std::exception&) {
    data_error("manifest row " + std::to_string(row) + ": cannot parse " + name + " value '" +
               field + "'");
  }
  if (pos != field.size())
    data_error("manifest row " + std::to_string(row) + ": cannot parse " + name + " value '" +
               field + "'");
  if (v < 0 || v >= max_exclusive)
    data_error("manifest row " + std::to_string(row) + ": " + name + " value " +
               std::to_string(v) + " out of range [0," + std::to_string(max_exclusive) + ")");
  return v;
}

}  // namespace

ManifestResult parse_manifest(const std::string& text, const std::string& source) {
  ManifestResult result;
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty() && cur.back() == '\r') cur.pop_back();
  if (!cur.empty()) lines.push_back(cur);
  if (lines.empty()) data_error(source + ": empty manifest");

  const auto header = split_csv_line(lines[0]);
  const std::vector<std::string> expected = {"path", "accent", "age_group", "gender"};
  if (header.size() != expected.size()) {
    data_error(source + ": manifest header must be 'path,accent,age_group,gender', got '" +
               lines[0] + "'");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (trim(header[i]) != expected[i])
      data_error(source + ": missing column '" + expected[i] + "' (found '" + trim(header[i]) +
                 "')");
  }

  std::vector<std::string> seen_paths;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_csv_line(lines[li]);
    const std::size_t row = li + 1;  // 1-based file line
    if (fields.size() != 4)
      data_error(source + ": row " + std::to_string(row) + " has " +
                 std::to_string(fields.size()) + " fields, expected 4");
    SampleRecord rec;
    rec.audio_path = trim(fields[0]);
    if (rec.audio_path.empty())
      data_error(source + ": row " + std::to_string(row) + " has an empty path");
    rec.accent = parse_label(trim(fields[1]), "accent", kNumAccents, row);
    rec.age_group = parse_label(trim(fields[2]), "age_group", kNumAgeGroups, row);
    rec.gender = parse_label(trim(fields[3]), "gender", kNumGenders, row);
    if (std::find(seen_paths.begin(), seen_paths.end(), rec.audio_path) != seen_paths.end())
      result.warnings.push_back("duplicate path '" + rec.audio_path + "' at row " +
                                std::to_string(row) + " (kept)");
    seen_paths.push_back(rec.audio_path);
    result.records.push_back(std::move(rec));
  }
  return result;
}

ManifestResult load_manifest(const std::string& path) {
  return parse_manifest(io::read_file(path), path);
}

void deterministic_shuffle(std::vector<std::size_t>& indices, std::mt19937_64& generator) {
  rng::shuffle(indices, generator);
}

DatasetSplit split_dataset(const std::vector<SampleRecord>& records, std::uint64_t seed) {
  if (records.size() < 3) data_error("split_dataset: need at least 3 records");
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  deterministic_shuffle(order, rng);

  // validation/test sizes round to nearest so every subset stays within one
  // record of the exact 6:2:2 ratio; train takes the remainder
  const std::size_t n = records.size();
  const std::size_t n_val = (n + 2) / 5;
  const std::size_t n_test = (n + 2) / 5;
  const std::size_t n_train = n - n_val - n_test;

  DatasetSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    const SampleRecord& rec = records[order[i]];
    if (i < n_train)
      split.train.push_back(rec);
    else if (i < n_train + n_val)
      split.validation.push_back(rec);
    else
      split.test.push_back(rec);
  }
  return split;
}

namespace {

// Strips a `_aug<k>` suffix from the path stem; empty when not augmented.
std::string augmentation_source(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  const std::size_t stem_start = slash == std::string::npos ? 0 : slash + 1;
  const std::size_t dot = path.find_last_of('.');
  const std::size_t stem_end = (dot == std::string::npos || dot < stem_start) ? path.size() : dot;
  const std::string stem = path.substr(stem_start, stem_end - stem_start);
  const std::size_t mark = stem.rfind("_aug");
  if (mark == std::string::npos || mark + 4 >= stem.size()) return "";
  for (std::size_t i = mark + 4; i < stem.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(stem[i]))) return "";
  return path.substr(0, stem_start) + stem.substr(0, mark) +
         (stem_end < path.size() ? path.substr(stem_end) : "");
}

}  // namespace

DatasetSplit split_with_augmented(const std::vector<SampleRecord>& records, std::uint64_t seed) {
  std::vector<SampleRecord> base;
  std::vector<std::pair<SampleRecord, std::string>> augmented;  // record, source path
  for (const auto& rec : records) {
    const std::string src = augmentation_source(rec.audio_path);
    if (src.empty())
      base.push_back(rec);
    else
      augmented.emplace_back(rec, src);
  }
  DatasetSplit split = split_dataset(base, seed);
  for (const auto& [rec, src] : augmented) {
    const bool in_train =
        std::any_of(split.train.begin(), split.train.end(),
                    [&](const SampleRecord& r) { return r.audio_path == src; });
    if (in_train) split.train.push_back(rec);
  }
  return split;
}

}  // namespace accentnet::dataset

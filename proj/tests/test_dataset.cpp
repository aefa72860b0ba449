#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <set>

#include "accentnet/dataset.hpp"
#include "accentnet/dsp.hpp"
#include "accentnet/io_util.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace accentnet;
using namespace accentnet::dataset;

namespace {

// Independent WAV writer: builds the RIFF bytes by hand, sharing nothing with
// the library's encoder.
std::string oracle_wav_pcm16(const std::vector<std::vector<std::int16_t>>& channels, int rate) {
  const std::size_t n = channels[0].size();
  const std::size_t ch = channels.size();
  std::string bytes;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](std::uint16_t v) {
    bytes.push_back(static_cast<char>(v & 0xff));
    bytes.push_back(static_cast<char>((v >> 8) & 0xff));
  };
  bytes += "RIFF";
  u32(static_cast<std::uint32_t>(36 + n * ch * 2));
  bytes += "WAVEfmt ";
  u32(16);
  u16(1);
  u16(static_cast<std::uint16_t>(ch));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * ch * 2));
  u16(static_cast<std::uint16_t>(ch * 2));
  u16(16);
  bytes += "data";
  u32(static_cast<std::uint32_t>(n * ch * 2));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < ch; ++c)
      u16(static_cast<std::uint16_t>(channels[c][i]));
  return bytes;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "accentnet-dataset-tests";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("load_wav decodes PCM16 zeros and the -32768 scale point") {
  std::vector<std::vector<std::int16_t>> mono = {std::vector<std::int16_t>(100, 0)};
  auto clip = decode_wav(oracle_wav_pcm16(mono, 8000), "zeros");
  CHECK(clip.channels() == 1);
  CHECK(clip.sample_rate == 8000);
  CHECK(clip.length() == 100);
  for (float v : clip.samples[0]) CHECK(v == 0.0f);

  std::vector<std::vector<std::int16_t>> extreme = {{-32768, 32767, 0}};
  auto clip2 = decode_wav(oracle_wav_pcm16(extreme, 44100), "extremes");
  CHECK(clip2.samples[0][0] == doctest::Approx(-1.0));
  CHECK(clip2.samples[0][1] == doctest::Approx(32767.0 / 32768.0));
}

TEST_CASE("load_wav round-trips a sine against the independent writer") {
  const int sr = 22050;
  std::vector<std::int16_t> q(2000);
  std::vector<double> truth(2000);
  for (std::size_t i = 0; i < q.size(); ++i) {
    truth[i] = 0.8 * std::sin(2.0 * std::numbers::pi * 1000.0 * i / sr);
    q[i] = static_cast<std::int16_t>(std::lround(truth[i] * 32768.0));
  }
  const auto path = (temp_dir() / "sine.wav").string();
  io::write_file_atomic(path, oracle_wav_pcm16({q, q}, sr));
  const auto clip = load_wav(path);
  CHECK(clip.channels() == 2);
  double max_err = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i)
    max_err = std::max(max_err, std::abs(clip.samples[0][i] - truth[i]));
  CHECK(max_err < 1.0 / 32768.0);
}

TEST_CASE("wav writer / reader round trip stays within one quantization step") {
  AudioClip clip;
  clip.sample_rate = 44100;
  clip.samples = {std::vector<float>(500), std::vector<float>(500)};
  const auto noise = oracle::random_values(500, 7);
  for (std::size_t i = 0; i < 500; ++i) {
    clip.samples[0][i] = static_cast<float>(noise[i] * 0.9);
    clip.samples[1][i] = static_cast<float>(-noise[i] * 0.9);
  }
  const auto back = decode_wav(encode_wav_pcm16(clip), "roundtrip");
  for (int c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 500; ++i)
      CHECK(std::abs(back.samples[c][i] - clip.samples[c][i]) <= 1.0f / 32768.0f);
}

TEST_CASE("load_wav rejects unsupported headers with the offending field") {
  std::vector<std::vector<std::int16_t>> mono = {{0, 0}};
  std::string bytes = oracle_wav_pcm16(mono, 8000);

  std::string mulaw = bytes;
  mulaw[20] = 7;  // format tag -> mu-law
  CHECK_THROWS_WITH_AS((void)decode_wav(mulaw, "f"),
                       doctest::Contains("unsupported audio format tag 7"), Error);

  std::string eight_bit = bytes;
  eight_bit[34] = 8;  // bits per sample
  CHECK_THROWS_WITH_AS((void)decode_wav(eight_bit, "f"), doctest::Contains("bit depth 8"), Error);

  std::string four_channel = bytes;
  four_channel[22] = 4;
  CHECK_THROWS_WITH_AS((void)decode_wav(four_channel, "f"),
                       doctest::Contains("channel count 4"), Error);

  CHECK_THROWS_AS((void)decode_wav("RIFFxxxxWAVE", "f"), Error);
  CHECK_THROWS_AS((void)decode_wav("not a wav", "f"), Error);
}

TEST_CASE("load_wav accepts float32 data") {
  std::string bytes;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [&](std::uint16_t v) {
    bytes.push_back(static_cast<char>(v & 0xff));
    bytes.push_back(static_cast<char>((v >> 8) & 0xff));
  };
  bytes += "RIFF";
  u32(36 + 8);
  bytes += "WAVEfmt ";
  u32(16);
  u16(3);  // IEEE float
  u16(1);
  u32(16000);
  u32(16000 * 4);
  u16(4);
  u16(32);
  bytes += "data";
  u32(8);
  const float vals[2] = {0.25f, -0.75f};
  for (float f : vals) u32(std::bit_cast<std::uint32_t>(f));
  const auto clip = decode_wav(bytes, "float");
  CHECK(clip.samples[0][0] == 0.25f);
  CHECK(clip.samples[0][1] == -0.75f);
}

TEST_CASE("standardize is the identity on conforming clips") {
  AudioClip clip;
  clip.sample_rate = 44100;
  clip.samples = {std::vector<float>(264600), std::vector<float>(264600)};
  const auto noise = oracle::random_values(264600, 9);
  for (std::size_t i = 0; i < noise.size(); ++i) {
    clip.samples[0][i] = static_cast<float>(noise[i]);
    clip.samples[1][i] = static_cast<float>(-noise[i]);
  }
  const auto out = standardize(clip);
  CHECK(out.sample_rate == 44100);
  CHECK(out.samples == clip.samples);
}

TEST_CASE("standardize pads, duplicates mono, trims") {
  AudioClip clip;
  clip.sample_rate = 44100;
  clip.samples = {std::vector<float>(3 * 44100, 0.5f)};
  const auto out = standardize(clip);
  CHECK(out.channels() == 2);
  CHECK(out.length() == 6 * 44100);
  for (int c = 0; c < 2; ++c) {
    CHECK(out.samples[c][3 * 44100 - 1] == 0.5f);
    for (std::size_t i = 3 * 44100; i < out.length(); ++i) CHECK(out.samples[c][i] == 0.0f);
  }
  CHECK(out.samples[0] == out.samples[1]);

  AudioClip longer;
  longer.sample_rate = 44100;
  longer.samples = {std::vector<float>(8 * 44100, 0.25f), std::vector<float>(8 * 44100, 0.25f)};
  CHECK(standardize(longer).length() == 6 * 44100);

  AudioClip empty;
  empty.sample_rate = 44100;
  empty.samples = {{}};
  CHECK_THROWS_AS((void)standardize(empty), Error);
}

TEST_CASE("resampling keeps the dominant DFT bin") {
  AudioClip clip;
  clip.sample_rate = 22050;
  std::vector<float> s(22050);
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = static_cast<float>(0.7 * std::sin(2.0 * std::numbers::pi * 100.0 * i / 22050.0));
  clip.samples = {s};
  const auto out = standardize(clip, 44100, 1.0);
  CHECK(out.length() == 44100);

  // 1 s at 44100 Hz: bin index == frequency in Hz
  std::vector<std::complex<double>> buf(65536, 0.0);
  for (std::size_t i = 0; i < out.length(); ++i) buf[i] = out.samples[0][i];
  dsp::fft(buf);
  std::size_t best = 0;
  for (std::size_t k = 1; k < buf.size() / 2; ++k)
    if (std::abs(buf[k]) > std::abs(buf[best])) best = k;
  const double freq = static_cast<double>(best) * 44100.0 / 65536.0;
  CHECK(std::abs(freq - 100.0) < 1.0);
}

TEST_CASE("standardize is idempotent") {
  AudioClip clip;
  clip.sample_rate = 31000;
  std::vector<float> s(31000 * 2);
  const auto noise = oracle::random_values(s.size(), 13);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<float>(noise[i] * 0.9);
  clip.samples = {s};
  const auto once = standardize(clip);
  const auto twice = standardize(once);
  CHECK(once.samples == twice.samples);
  CHECK(once.sample_rate == twice.sample_rate);
}

TEST_CASE("gaussian noise contract") {
  AudioClip clip;
  clip.sample_rate = 44100;
  clip.samples = {std::vector<float>(1000, 0.25f), std::vector<float>(1000, 0.25f)};

  const auto same = add_gaussian_noise(clip, 0.0, 42);
  CHECK(same.samples == clip.samples);

  const auto a = add_gaussian_noise(clip, 10.0, 42);
  const auto b = add_gaussian_noise(clip, 10.0, 42);
  CHECK(a.samples == b.samples);
  const auto c = add_gaussian_noise(clip, 10.0, 43);
  CHECK(a.samples != c.samples);

  CHECK(a.channels() == 2);
  CHECK(a.length() == 1000);
  CHECK(a.sample_rate == 44100);
  CHECK_THROWS_AS((void)add_gaussian_noise(clip, -1.0, 1), Error);
}

TEST_CASE("gaussian noise empirical standard deviation") {
  AudioClip clip;
  clip.sample_rate = 44100;
  clip.samples = {std::vector<float>(264600, 0.0f)};
  const auto noisy = add_gaussian_noise(clip, 10.0, 2024);
  double mean = 0.0;
  for (float v : noisy.samples[0]) mean += v;
  mean /= static_cast<double>(noisy.length());
  double var = 0.0;
  for (float v : noisy.samples[0]) var += (v - mean) * (v - mean);
  var /= static_cast<double>(noisy.length());
  const double std_lsb = std::sqrt(var) * 32768.0;
  CHECK(std_lsb > 9.9);
  CHECK(std_lsb < 10.1);
}

TEST_CASE("manifest parsing") {
  const auto empty = parse_manifest("path,accent,age_group,gender\n", "m");
  CHECK(empty.records.empty());

  const auto one = parse_manifest("path,accent,age_group,gender\na.wav,5,4,1\n", "m");
  REQUIRE(one.records.size() == 1);
  CHECK(one.records[0].audio_path == "a.wav");
  CHECK(one.records[0].accent == 5);
  CHECK(one.records[0].age_group == 4);
  CHECK(one.records[0].gender == 1);

  CHECK_THROWS_WITH_AS(
      (void)parse_manifest("path,accent,age_group,gender\na.wav,6,0,0\n", "m"),
      doctest::Contains("row 2"), Error);
  CHECK_THROWS_WITH_AS(
      (void)parse_manifest("path,accent,age_group,gender\na.wav,6,0,0\n", "m"),
      doctest::Contains("accent value 6"), Error);
  CHECK_THROWS_WITH_AS((void)parse_manifest("path,accent,age_group\na.wav,0,0\n", "m"),
                       doctest::Contains("header"), Error);
  CHECK_THROWS_WITH_AS((void)parse_manifest("path,accent,gender,age_group\na,0,0,0\n", "m"),
                       doctest::Contains("missing column 'age_group'"), Error);

  const auto dup = parse_manifest("path,accent,age_group,gender\na.wav,0,0,0\na.wav,1,1,1\n", "m");
  CHECK(dup.records.size() == 2);
  REQUIRE(dup.warnings.size() == 1);
  CHECK(dup.warnings[0].find("duplicate path") != std::string::npos);

  // CRLF and blank lines are tolerated
  const auto crlf = parse_manifest("path,accent,age_group,gender\r\nb.wav,1,2,0\r\n\r\n", "m");
  CHECK(crlf.records.size() == 1);
  CHECK(crlf.records[0].audio_path == "b.wav");
}

TEST_CASE("split_dataset ratios and determinism") {
  auto make_records = [](int n) {
    std::vector<SampleRecord> r;
    for (int i = 0; i < n; ++i)
      r.push_back({"clip" + std::to_string(i) + ".wav", i % 6, i % 5, i % 2});
    return r;
  };

  const auto s100 = split_dataset(make_records(100), 7);
  CHECK(s100.train.size() == 60);
  CHECK(s100.validation.size() == 20);
  CHECK(s100.test.size() == 20);

  const auto s10 = split_dataset(make_records(10), 7);
  CHECK(s10.train.size() == 6);
  CHECK(s10.validation.size() == 2);
  CHECK(s10.test.size() == 2);

  const auto a = split_dataset(make_records(37), 99);
  const auto b = split_dataset(make_records(37), 99);
  auto paths = [](const std::vector<SampleRecord>& v) {
    std::vector<std::string> p;
    for (const auto& r : v) p.push_back(r.audio_path);
    return p;
  };
  CHECK(paths(a.train) == paths(b.train));
  CHECK(paths(a.validation) == paths(b.validation));
  CHECK(paths(a.test) == paths(b.test));

  // partition property: disjoint and union-complete
  std::set<std::string> seen;
  for (const auto* part : {&a.train, &a.validation, &a.test})
    for (const auto& r : *part) CHECK(seen.insert(r.audio_path).second);
  CHECK(seen.size() == 37);
  CHECK(a.train.size() + a.validation.size() + a.test.size() == 37);
  CHECK(a.train.size() >= 21);  // 60% of 37 = 22.2, train takes the remainder (23)

  CHECK_THROWS_AS((void)split_dataset(make_records(2), 1), Error);
}

TEST_CASE("split sizes stay within one record of the 6:2:2 ratio") {
  std::vector<SampleRecord> records;
  for (int n = 3; n <= 150; ++n) {
    records.push_back({"r" + std::to_string(n) + ".wav", n % 6, n % 5, n % 2});
    if (records.size() < 3) continue;
    const auto split = split_dataset(records, 11);
    const double total = static_cast<double>(records.size());
    CHECK(std::abs(static_cast<double>(split.train.size()) - 0.6 * total) <= 1.0);
    CHECK(std::abs(static_cast<double>(split.validation.size()) - 0.2 * total) <= 1.0);
    CHECK(std::abs(static_cast<double>(split.test.size()) - 0.2 * total) <= 1.0);
    CHECK(split.train.size() + split.validation.size() + split.test.size() == records.size());
  }
}

TEST_CASE("augmented records follow their source clip into train") {
  std::vector<SampleRecord> records;
  for (int i = 0; i < 10; ++i)
    records.push_back({"c" + std::to_string(i) + ".wav", i % 6, 0, 0});
  for (int i = 0; i < 10; ++i)
    records.push_back({"c" + std::to_string(i) + "_aug0.wav", i % 6, 0, 0});

  const auto split = split_with_augmented(records, 5);
  CHECK(split.validation.size() == 2);
  CHECK(split.test.size() == 2);
  // 6 base train clips, each with exactly one surviving augmented copy
  CHECK(split.train.size() == 12);
  for (const auto& r : split.validation) CHECK(r.audio_path.find("_aug") == std::string::npos);
  for (const auto& r : split.test) CHECK(r.audio_path.find("_aug") == std::string::npos);
  int augmented = 0;
  for (const auto& r : split.train)
    if (r.audio_path.find("_aug") != std::string::npos) ++augmented;
  CHECK(augmented == 6);
}

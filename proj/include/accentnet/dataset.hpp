#ifndef ACCENTNET_DATASET_HPP
#define ACCENTNET_DATASET_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace accentnet::dataset {

constexpr int kNumAccents = 6;
constexpr int kNumAgeGroups = 5;
constexpr int kNumGenders = 2;

extern const char* const kAccentNames[kNumAccents];   // Scottish .. Mandarin
extern const char* const kAgeGroupNames[kNumAgeGroups];
extern const char* const kGenderNames[kNumGenders];   // male=0, female=1

struct AudioClip {
  std::vector<std::vector<float>> samples;  // one vector per channel, [-1, +1]
  int sample_rate = 0;

  int channels() const { return static_cast<int>(samples.size()); }
  std::size_t length() const { return samples.empty() ? 0 : samples[0].size(); }
};

struct SampleRecord {
  std::string audio_path;
  int accent = 0;     // 0..5
  int age_group = 0;  // 0..4
  int gender = 0;     // 0..1
};

struct DatasetSplit {
  std::vector<SampleRecord> train;
  std::vector<SampleRecord> validation;
  std::vector<SampleRecord> test;
  std::uint64_t seed = 0;
};

struct ManifestResult {
  std::vector<SampleRecord> records;
  std::vector<std::string> warnings;
};

// RIFF/WAVE reader; PCM 16-bit or IEEE float 32-bit, 1 or 2 channels.
AudioClip load_wav(const std::string& path);
AudioClip decode_wav(const std::string& bytes, const std::string& source);

// PCM16 little-endian writer used by the preprocess command.
std::string encode_wav_pcm16(const AudioClip& clip);
void write_wav_pcm16(const AudioClip& clip, const std::string& path);

// Resample (linear interpolation) to target_sr, duplicate mono into stereo,
// then trim/pad the tail to exactly duration_s * target_sr samples.
AudioClip standardize(const AudioClip& clip, int target_sr = 44100, double duration_s = 6.0);

// Adds i.i.d. zero-mean Gaussian noise with standard deviation sigma_lsb on
// the 16-bit integer scale (sigma_lsb / 32768 per normalized sample); output
// clamped to [-1, +1]. Deterministic for a fixed seed.
AudioClip add_gaussian_noise(const AudioClip& clip, double sigma_lsb, std::uint64_t seed);

// CSV manifest: header `path,accent,age_group,gender`.
ManifestResult load_manifest(const std::string& path);
ManifestResult parse_manifest(const std::string& text, const std::string& source);

// Deterministic shuffle by seed, then 60/20/20 partition; train takes the
// rounding remainder.
DatasetSplit split_dataset(const std::vector<SampleRecord>& records, std::uint64_t seed);

// Augmented records (path stem ending in `_aug<k>`) follow their source clip:
// kept in train when the source is in train, dropped otherwise. Returns the
// split of base records with train extended by the surviving augmented rows.
DatasetSplit split_with_augmented(const std::vector<SampleRecord>& records, std::uint64_t seed);

// Portable deterministic helpers (the standard library distributions are not
// reproducible across implementations).
double gaussian_sample(std::mt19937_64& rng);
void deterministic_shuffle(std::vector<std::size_t>& indices, std::mt19937_64& rng);

}  // namespace accentnet::dataset

#endif

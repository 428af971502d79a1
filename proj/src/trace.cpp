#include "finmon/trace.hpp"

#include <openssl/evp.h>

#include <json.hpp>
#include <stdexcept>

namespace finmon {

std::string build_trace(ConstructionState& st, uint64_t steps) {
  while (st.cursor() < steps) st.step();
  const auto& log = st.log();
  if (log.size() < steps)
    throw std::invalid_argument("build_trace: step log does not cover the requested prefix");

  nlohmann::json doc;
  doc["format_version"] = 1;
  doc["p"] = st.field().p;
  doc["enumeration_rule"] = "amb,dim,rowserial-lex";
  doc["schedule_rule"] = "grade,phi";
  nlohmann::json arr = nlohmann::json::array();
  const Enumeration& en = st.enumeration();
  Subspace last_wm(st.field());
  std::string last_wm_id;
  for (uint64_t i = 0; i < steps; ++i) {
    const StepRecord& rec = log[i];
    nlohmann::json s;
    s["i"] = rec.index;
    s["candidate"] = format_multiset(rec.candidate);
    s["action"] = rec.processed ? "process" : "skip";
    if (rec.processed)
      s["w"] = en.rank(rec.w).get_str();
    else
      s["w"] = nullptr;
    if (rec.watermark.is_zero()) {
      s["watermark"] = nullptr;
    } else {
      if (rec.watermark != last_wm) {  // ranks repeat across skipped steps
        last_wm = rec.watermark;
        last_wm_id = en.rank(last_wm).get_str();
      }
      s["watermark"] = last_wm_id;
    }
    arr.push_back(std::move(s));
  }
  doc["steps"] = std::move(arr);
  return doc.dump();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace finmon

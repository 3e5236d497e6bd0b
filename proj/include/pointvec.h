#pragma once

/* C interface to the pointing-detection library. All functions return pv_status
 * (except trivial accessors and destructors); on failure pv_last_error() holds a
 * message for the calling thread. Strings returned through char** are heap copies
 * owned by the caller and released with pv_string_free(). Strings returned through
 * const char** stay owned by the object they came from. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef PV_API
#if defined(_WIN32)
#define PV_API __declspec(dllexport)
#elif defined(__GNUC__)
#define PV_API __attribute__((visibility("default")))
#else
#define PV_API
#endif
#endif

typedef enum pv_status {
    PV_OK = 0,
    PV_ERR_INVALID_ARGUMENT = 1,
    PV_ERR_BAD_CONFIG = 2,
    PV_ERR_IO = 3,
    PV_ERR_DIMENSION_MISMATCH = 4,
    PV_ERR_BAD_STATE = 5,
    PV_ERR_INTERNAL = 6
} pv_status;

typedef struct pv_frame pv_frame;       /* RGB raster */
typedef struct pv_source pv_source;     /* sequential frame reader */
typedef struct pv_faces pv_faces;       /* face-rectangle sidecar */
typedef struct pv_pipeline pv_pipeline; /* stateful detector */
typedef struct pv_result pv_result;     /* one processed frame */

PV_API const char* pv_version(void);
PV_API const char* pv_last_error(void);
PV_API void pv_string_free(char* s);

/* ---- frames --------------------------------------------------------------- */

PV_API pv_status pv_frame_create(int width, int height, pv_frame** out);
PV_API void pv_frame_free(pv_frame* f);
PV_API int pv_frame_width(const pv_frame* f);
PV_API int pv_frame_height(const pv_frame* f);
PV_API pv_status pv_frame_get_pixel(const pv_frame* f, int x, int y, unsigned char rgb[3]);
PV_API pv_status pv_frame_set_pixel(pv_frame* f, int x, int y, const unsigned char rgb[3]);
PV_API pv_status pv_frame_read_ppm(const char* path, pv_frame** out);
PV_API pv_status pv_frame_write_ppm(const pv_frame* f, const char* path);
/* Adds delta to every channel, clamping to [0,255]; writes a new frame. */
PV_API pv_status pv_frame_shift_brightness(const pv_frame* f, int delta, pv_frame** out);

/* ---- frame sources ---------------------------------------------------------
 * A source yields frames from a concatenated binary-PPM stream. pv_source_next
 * sets *out to NULL at a clean end of stream and fails on a truncated one. */

PV_API pv_status pv_source_open_stdin(pv_source** out);
PV_API pv_status pv_source_open_file(const char* path, pv_source** out);
PV_API pv_status pv_source_next(pv_source* s, pv_frame** out);
PV_API void pv_source_free(pv_source* s);

/* ---- face sidecar -----------------------------------------------------------
 * Text format: one "frame_index x y w h" line per face update, sorted by frame
 * index; '#' starts a comment. A lookup returns the latest rectangle at or
 * before the requested frame (found = 0 when there is none yet). */

PV_API pv_status pv_faces_load(const char* path, pv_faces** out);
PV_API pv_status pv_faces_parse(const char* text, pv_faces** out);
PV_API pv_status pv_faces_lookup(const pv_faces* f, int frame_index, int rect_out[4], int* found);
PV_API void pv_faces_free(pv_faces* f);

/* ---- pipeline --------------------------------------------------------------- */

/* Config is flat "key = value" text; see README for the key list. */
PV_API pv_status pv_pipeline_create(const char* config_text, pv_pipeline** out);
PV_API pv_status pv_pipeline_create_from_file(const char* config_path, pv_pipeline** out);
PV_API void pv_pipeline_free(pv_pipeline* p);

/* Feeds one frame. face is {x,y,w,h} or NULL to reuse the last known rectangle.
 * During the calibration phase *out is set to NULL; afterwards it receives a
 * result the caller frees with pv_result_free. */
PV_API pv_status pv_pipeline_process(pv_pipeline* p, const pv_frame* f, const int face[4],
                                     pv_result** out);
PV_API pv_status pv_pipeline_save_model(const pv_pipeline* p, const char* path);
PV_API pv_status pv_pipeline_load_model(pv_pipeline* p, const char* path);
/* Frames consumed so far — after pv_pipeline_load_model this is where the
 * numbering resumes, so callers can keep sidecar lookups aligned. */
PV_API int pv_pipeline_frames_seen(const pv_pipeline* p);
PV_API pv_status pv_pipeline_skin_histogram_text(const pv_pipeline* p, char** out);

/* ---- results --------------------------------------------------------------- */

PV_API void pv_result_free(pv_result* r);
/* One JSON object (no trailing newline). include_timing adds the per-stage "ms" map. */
PV_API pv_status pv_result_json(const pv_result* r, int include_timing, char** out);
PV_API int pv_result_frame_index(const pv_result* r);
PV_API pv_status pv_result_gesture(const pv_result* r, const char** out);
PV_API pv_status pv_result_light_action(const pv_result* r, const char** out);
PV_API int pv_result_stage_count(const pv_result* r);
PV_API pv_status pv_result_stage(const pv_result* r, int index, const char** name_out,
                                 double* ms_out);
/* Draws the analysis overlay over src into a new frame. */
PV_API pv_status pv_result_annotate(const pv_result* r, const pv_frame* src, pv_frame** out);

/* ---- synthetic scenes ------------------------------------------------------- */

PV_API pv_status pv_synth_background(uint64_t bg_seed, int width, int height, int brightness,
                                     pv_frame** out);

/* gesture is "pointing", "palm", or "fist". frame_index is stamped into the truth
 * record. face_out receives the ground-truth face rectangle for the sidecar. */
PV_API pv_status pv_synth_scene(const char* gesture, double angle_deg, uint64_t seed,
                                uint64_t bg_seed, int width, int height, int brightness,
                                int frame_index, pv_frame** frame_out, int face_out[4],
                                char** truth_json_out);

/* ---- evaluation -------------------------------------------------------------
 * Compares a detector JSONL file against a truth JSONL file covering the same
 * frame indices; returns a human-readable table and a JSON summary. */

PV_API pv_status pv_evaluate_files(const char* results_path, const char* truth_path,
                                   char** text_out, char** json_out);

#ifdef __cplusplus
}
#endif

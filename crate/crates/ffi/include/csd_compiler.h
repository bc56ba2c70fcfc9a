#ifndef CSD_COMPILER_H
#define CSD_COMPILER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum CsdStatus {
  CSD_STATUS_OK = 0,
  CSD_STATUS_NULL_POINTER = 1,
  CSD_STATUS_INVALID_ARGUMENT = 2,
  CSD_STATUS_NOT_UNITARY = 3,
  CSD_STATUS_PARSE = 4,
  CSD_STATUS_INDEX_OUT_OF_RANGE = 5,
  CSD_STATUS_INTERNAL = 6,
} CsdStatus;

/*
 Opaque complex matrix.
 */
typedef struct CsdMatrix CsdMatrix;

/*
 Opaque instruction sequence.
 */
typedef struct CsdProgram CsdProgram;

/*
 Compiler switches. Obtain defaults from [`csd_compile_options_default`].
 */
typedef struct CsdCompileOptions {
  bool lighten;
  bool extract_phases;
  bool expand_controls;
  /*
   Try every bit permutation at the root and keep the shortest program.
   */
  bool root_perm_search;
} CsdCompileOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or null after a success.
 The pointer stays valid until the next library call on the same thread.
 */
const char *csd_last_error_message(void);

/*
 Default compiler switches.
 */
struct CsdCompileOptions csd_compile_options_default(void);

/*
 New `rows x cols` matrix from `2 * rows * cols` doubles: row-major entries,
 each as a real part followed by an imaginary part.

 # Safety
 `re_im` must point to `2 * rows * cols` doubles and `out` must be writable.
 */
enum CsdStatus csd_matrix_new(size_t rows,
                              size_t cols,
                              const double *re_im,
                              struct CsdMatrix **out);

/*
 Parse a matrix in the text format.

 # Safety
 `text` must be a nul-terminated string and `out` must be writable.
 */
enum CsdStatus csd_matrix_parse(const char *text, struct CsdMatrix **out);

/*
 Serialize a matrix in the text format. Free the result with [`csd_string_free`].

 # Safety
 `m` must be a live handle and `out` must be writable.
 */
enum CsdStatus csd_matrix_to_text(const struct CsdMatrix *m, char **out);

/*
 Number of rows, or 0 for a null handle.

 # Safety
 `m` must be null or a live handle.
 */
size_t csd_matrix_rows(const struct CsdMatrix *m);

/*
 Number of columns, or 0 for a null handle.

 # Safety
 `m` must be null or a live handle.
 */
size_t csd_matrix_cols(const struct CsdMatrix *m);

/*
 Read entry `(row, col)`.

 # Safety
 `m` must be a live handle; `re` and `im` must be writable.
 */
enum CsdStatus csd_matrix_get(const struct CsdMatrix *m,
                              size_t row,
                              size_t col,
                              double *re,
                              double *im);

/*
 Frobenius distance between two matrices of equal shape.

 # Safety
 `a` and `b` must be live handles and `out` must be writable.
 */
enum CsdStatus csd_frobenius_distance(const struct CsdMatrix *a,
                                      const struct CsdMatrix *b,
                                      double *out);

/*
 Release a matrix. Null is ignored.

 # Safety
 `m` must be null or a handle not yet freed.
 */
void csd_matrix_free(struct CsdMatrix *m);

/*
 Compile a unitary matrix. Non-power-of-two dimensions are padded with an
 identity block. `options` may be null for the defaults.

 # Safety
 `m` must be a live handle, `options` null or valid, `out` writable.
 */
enum CsdStatus csd_compile(const struct CsdMatrix *m,
                           const struct CsdCompileOptions *options,
                           struct CsdProgram **out);

/*
 Parse SEO text. `nb == 0` infers the bit count from the highest bit used.

 # Safety
 `text` must be a nul-terminated string and `out` must be writable.
 */
enum CsdStatus csd_program_from_seo(const char *text, size_t nb, struct CsdProgram **out);

/*
 SEO text of a program. Free the result with [`csd_string_free`].

 # Safety
 `p` must be a live handle and `out` must be writable.
 */
enum CsdStatus csd_program_to_seo(const struct CsdProgram *p, char **out);

/*
 Number of instructions, or 0 for a null handle.

 # Safety
 `p` must be null or a live handle.
 */
size_t csd_program_len(const struct CsdProgram *p);

/*
 Bit count, or 0 for a null handle.

 # Safety
 `p` must be null or a live handle.
 */
size_t csd_program_nb(const struct CsdProgram *p);

/*
 Matrix realized by a program.

 # Safety
 `p` must be a live handle and `out` must be writable.
 */
enum CsdStatus csd_program_to_matrix(const struct CsdProgram *p, struct CsdMatrix **out);

/*
 Release a program. Null is ignored.

 # Safety
 `p` must be null or a handle not yet freed.
 */
void csd_program_free(struct CsdProgram *p);

/*
 Release a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void csd_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSD_COMPILER_H */

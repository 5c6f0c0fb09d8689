/* SPDX-License-Identifier: Apache-2.0
 *
 * The public header must compile as C and link against the shared library.
 */

#include "rhs/rhs.h"

#include <stdio.h>
#include <string.h>

int main(void) {
  rhs_config *cfg = NULL;
  rhs_status st = rhs_config_parse("[dims]\nS = 1\n", &cfg);
  if (st != RHS_ERR_PARSE || cfg != NULL) {
    fprintf(stderr, "expected a parse error, got %s\n", rhs_status_string(st));
    return 1;
  }
  if (strcmp(rhs_last_error_key(), "dims.K") != 0) {
    fprintf(stderr, "unexpected key '%s'\n", rhs_last_error_key());
    return 1;
  }
  printf("rhs %s: %s\n", rhs_version(), rhs_last_error());
  return 0;
}

#include <stdio.h>

#include "anyon_spectrum.h"

int main(void) {
    AnyonSystem *sys = NULL;
    if (anyon_system_new(0.5, 7.2973525693e-3, 1.0, 510998.95, &sys) != ANYON_STATUS_OK) {
        char msg[256];
        anyon_last_error_message(msg, sizeof msg);
        fprintf(stderr, "%s\n", msg);
        return 1;
    }
    AnyonEnergy e;
    AnyonStatus status = anyon_system_energy(sys, ANYON_METHOD_CLOSED, 0, 1, &e);
    if (status == ANYON_STATUS_OK) {
        printf("E' = %.4f eV\n", e.kinetic_ev);
    }
    anyon_system_free(sys);
    return status == ANYON_STATUS_OK ? 0 : 1;
}

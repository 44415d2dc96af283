int acceptance_placeholder_main() { return 0; } int main(){ return 0; }

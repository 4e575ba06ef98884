public class Target {
    public static int main(String[] args) {
        int a = 2;
        int b = a * 3;
        return b;
    }
}
